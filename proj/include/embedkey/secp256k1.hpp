#pragma once

#include <optional>

#include "embedkey/uint256.hpp"

// secp256k1 group arithmetic (SEC 2, y^2 = x^3 + 7 over F_p).
//
// Demo grade: double-and-add with data-dependent branches. Not constant time,
// not hardened against side channels. Do not use with keys that matter.

namespace embedkey::ec {

inline constexpr U256 kFieldPrime{0xFFFFFFFFFFFFFFFFull, 0xFFFFFFFFFFFFFFFFull,
                                  0xFFFFFFFFFFFFFFFFull, 0xFFFFFFFEFFFFFC2Full};
inline constexpr U256 kGroupOrder{0xFFFFFFFFFFFFFFFFull, 0xFFFFFFFFFFFFFFFEull,
                                  0xBAAEDCE6AF48A03Bull, 0xBFD25E8CD0364141ull};
inline constexpr U256 kGeneratorX{0x79BE667EF9DCBBACull, 0x55A06295CE870B07ull,
                                  0x029BFCDB2DCE28D9ull, 0x59F2815B16F81798ull};
inline constexpr U256 kGeneratorY{0x483ADA7726A3C465ull, 0x5DA4FBFC0E1108A8ull,
                                  0xFD17B448A6855419ull, 0x9C47D08FFB10D4B8ull};
inline constexpr std::uint64_t kCurveB = 7;

const Modulus& field();
const Modulus& group_order();

/// Affine point; `infinity` marks the group identity (x, y are then ignored).
struct Point {
    U256 x;
    U256 y;
    bool infinity = false;

    static Point at_infinity() { return Point{{}, {}, true}; }
    friend bool operator==(const Point&, const Point&) = default;
};

const Point& generator();

bool on_curve(const Point& p);

Point add(const Point& a, const Point& b);
Point dbl(const Point& a);
Point negate(const Point& a);

/// k * P for any 256-bit k (k is not reduced mod n).
Point mul(const U256& k, const Point& p);

/// a * G + b * P.
Point mul_add(const U256& a, const U256& b, const Point& p);

/// Point with the given x and y parity, or nullopt when x is not on the curve.
std::optional<Point> lift_x(const U256& x, bool y_odd);

} // namespace embedkey::ec
