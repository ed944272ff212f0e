#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "embedkey/hash.hpp"
#include "embedkey/hex.hpp"
#include "embedkey/keyforge.hpp"

namespace embedkey {

inline constexpr std::uint8_t kP2pkhVersion = 0x00;
inline constexpr std::uint8_t kWifVersion = 0x80;

using Hash160 = crypto::Digest20;

/// RIPEMD-160(SHA-256(data)).
Hash160 hash160(std::span<const std::uint8_t> data);
/// SHA-256(SHA-256(data)).
crypto::Digest32 sha256d(std::span<const std::uint8_t> data);

std::string base58_encode(std::span<const std::uint8_t> data);
/// Throws FormatError("base58") on characters outside the alphabet.
Bytes base58_decode(std::string_view text);

/// Base58(version || payload || first 4 bytes of SHA256D(version || payload)).
std::string base58check_encode(std::uint8_t version, std::span<const std::uint8_t> payload);

/// Inverse of base58check_encode. FormatError on bad characters or a decoded
/// length under 5 bytes; ChecksumError when the checksum does not match.
std::pair<std::uint8_t, Bytes> base58check_decode(std::string_view text);

/// Validated P2PKH address: version byte, 20-byte hash160 payload and the
/// Base58Check text for both.
class Address {
public:
    Address(std::uint8_t version, const Hash160& payload);
    /// Throws FormatError / ChecksumError, or FormatError("address") when the
    /// payload is not 20 bytes.
    static Address parse(std::string_view text);

    std::uint8_t version() const { return version_; }
    const Hash160& payload() const { return payload_; }
    const std::string& text() const { return text_; }

    friend bool operator==(const Address& a, const Address& b) { return a.text_ == b.text_; }
    friend auto operator<=>(const Address& a, const Address& b) { return a.text_ <=> b.text_; }

private:
    std::uint8_t version_;
    Hash160 payload_;
    std::string text_;
};

Address p2pkh_address(const PublicKey& pub, bool compressed, std::uint8_t version = kP2pkhVersion);

std::string wif_encode(const PrivateKey& priv, bool compressed, std::uint8_t version = kWifVersion);

struct DecodedWif {
    std::uint8_t version;
    Secret secret;
    bool compressed;
};
/// Throws FormatError("wif") for a payload that is not 32 or 33(+0x01) bytes.
DecodedWif wif_decode(std::string_view text);

} // namespace embedkey
