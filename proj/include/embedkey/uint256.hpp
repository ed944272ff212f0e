#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace embedkey::ec {

/// Unsigned 256-bit integer, four 64-bit limbs, least significant first.
struct U256 {
    std::array<std::uint64_t, 4> limb{};

    constexpr U256() = default;
    constexpr explicit U256(std::uint64_t v) : limb{v, 0, 0, 0} {}
    constexpr U256(std::uint64_t l3, std::uint64_t l2, std::uint64_t l1, std::uint64_t l0)
        : limb{l0, l1, l2, l3} {}

    static U256 from_be_bytes(std::span<const std::uint8_t, 32> bytes);
    /// Up to 64 hex digits, most significant first. Throws FormatError.
    static U256 from_hex(std::string_view hex);

    std::array<std::uint8_t, 32> to_be_bytes() const;
    std::string to_hex() const;

    bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }
    bool bit(unsigned i) const { return (limb[i / 64] >> (i % 64)) & 1u; }
    bool is_odd() const { return limb[0] & 1u; }
    /// Index of the highest set bit plus one; 0 for zero.
    unsigned bit_length() const;

    friend bool operator==(const U256&, const U256&) = default;
    friend std::strong_ordering operator<=>(const U256& a, const U256& b)
    {
        for (int i = 3; i >= 0; --i)
            if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
        return std::strong_ordering::equal;
    }
};

/// a + b; returns the carry out.
std::uint64_t add_carry(const U256& a, const U256& b, U256& out);
/// a - b; returns the borrow out.
std::uint64_t sub_borrow(const U256& a, const U256& b, U256& out);
U256 shr1(const U256& a);

/// Arithmetic modulo m where m > 2^255, reduced through 2^256 = c (mod m).
/// Both secp256k1 moduli have this shape.
class Modulus {
public:
    explicit Modulus(const U256& m);

    const U256& value() const { return m_; }

    /// Any 256-bit value into [0, m).
    U256 reduce(const U256& a) const;
    U256 add(const U256& a, const U256& b) const;
    U256 sub(const U256& a, const U256& b) const;
    U256 neg(const U256& a) const;
    U256 mul(const U256& a, const U256& b) const;
    U256 sqr(const U256& a) const { return mul(a, a); }
    U256 pow(const U256& base, const U256& exponent) const;
    /// Inverse by Fermat's little theorem; m must be prime and a nonzero.
    U256 inv(const U256& a) const;

private:
    U256 m_;
    U256 c_; // 2^256 - m
};

} // namespace embedkey::ec
