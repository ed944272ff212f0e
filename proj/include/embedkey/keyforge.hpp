#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "embedkey/embedding.hpp"
#include "embedkey/hash.hpp"
#include "embedkey/hex.hpp"
#include "embedkey/secp256k1.hpp"

// Key-pair derivation from a 256-bit binary code:
//
//   secret   = code bits packed big-endian            (32 bytes)
//   d        = int(secret)                            without a password
//   d        = int(SHA-256(secret || PBKDF2(pw)))     with a password
//   d        = int(SHA-256(bytes)) mod (n - 1) + 1    if d == 0 or d >= n
//   Q        = d * G
//
// Signing is ECDSA over SHA256D(message) with RFC 6979 nonces and low-s.
// Demo grade only: the curve arithmetic is not constant time.

namespace embedkey {

using Secret = std::array<std::uint8_t, 32>;

inline constexpr std::string_view kDefaultSalt = "embedkey-v1";
inline constexpr std::uint32_t kDefaultPbkdf2Iterations = 100000;

/// Scalar d with 1 <= d <= n - 1.
class PrivateKey {
public:
    /// Throws std::invalid_argument when d is zero or >= n.
    explicit PrivateKey(const ec::U256& d);
    static PrivateKey from_hex(std::string_view hex);

    const ec::U256& scalar() const { return d_; }
    Secret bytes() const { return d_.to_be_bytes(); }
    std::string hex() const { return d_.to_hex(); }

    friend bool operator==(const PrivateKey&, const PrivateKey&) = default;

private:
    ec::U256 d_;
};

/// Affine curve point, never infinity.
class PublicKey {
public:
    /// Throws std::invalid_argument when the point is not on the curve.
    explicit PublicKey(const ec::Point& point);
    /// Accepts SEC1 uncompressed (65 bytes, 0x04) or compressed (33 bytes,
    /// 0x02/0x03). Throws FormatError("pubkey") on a bad prefix or length and
    /// std::invalid_argument when the point is off the curve.
    static PublicKey parse(std::span<const std::uint8_t> sec);

    const ec::Point& point() const { return point_; }
    Bytes serialize(bool compressed) const;

    friend bool operator==(const PublicKey&, const PublicKey&) = default;

private:
    ec::Point point_;
};

struct Signature {
    ec::U256 r;
    ec::U256 s;

    /// r || s, 32 bytes each, big-endian.
    std::array<std::uint8_t, 64> compact() const;
    static Signature from_compact(std::span<const std::uint8_t> bytes);

    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Requires code.dim() == 256, else std::invalid_argument.
Secret secret_from_code(const BinaryCode& code);

/// PBKDF2-HMAC-SHA-256, 32-byte output. An empty password is allowed.
Secret pbkdf2_derive(std::span<const std::uint8_t> password,
                     std::span<const std::uint8_t> salt,
                     std::uint32_t iterations);

/// Total map from 256-bit codes (plus optional password) to valid scalars.
PrivateKey derive_private_key(const BinaryCode& code,
                              const std::optional<Bytes>& password,
                              std::span<const std::uint8_t> salt,
                              std::uint32_t iterations);

PublicKey derive_public_key(const PrivateKey& priv);

/// RFC 6979 (HMAC-SHA-256) nonce for a 32-byte message digest. `attempt`
/// selects the n-th candidate, used when a candidate yields r or s == 0.
ec::U256 deterministic_nonce(const PrivateKey& priv, const crypto::Digest32& digest, unsigned attempt = 0);

Signature sign(const PrivateKey& priv, std::span<const std::uint8_t> message);

/// False for a mismatching or malformed (r or s outside [1, n-1]) signature.
bool verify(const PublicKey& pub, std::span<const std::uint8_t> message, const Signature& sig);

} // namespace embedkey
