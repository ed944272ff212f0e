#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace embedkey::crypto {

using Digest32 = std::array<std::uint8_t, 32>;
using Digest20 = std::array<std::uint8_t, 20>;

/// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
    Sha256();
    Sha256& update(std::span<const std::uint8_t> data);
    Digest32 finish();

private:
    void compress(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
    std::uint64_t total_ = 0;
};

/// Incremental RIPEMD-160.
class Ripemd160 {
public:
    Ripemd160();
    Ripemd160& update(std::span<const std::uint8_t> data);
    Digest20 finish();

private:
    void compress(const std::uint8_t* block);

    std::array<std::uint32_t, 5> state_;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
    std::uint64_t total_ = 0;
};

Digest32 sha256(std::span<const std::uint8_t> data);
Digest20 ripemd160(std::span<const std::uint8_t> data);

/// HMAC-SHA-256 (RFC 2104).
class HmacSha256 {
public:
    explicit HmacSha256(std::span<const std::uint8_t> key);
    HmacSha256& update(std::span<const std::uint8_t> data);
    Digest32 finish();

private:
    Sha256 inner_;
    Sha256 outer_;
};

Digest32 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);

/// PBKDF2 (RFC 8018) with HMAC-SHA-256, writing `out.size()` bytes.
/// Throws std::invalid_argument when iterations == 0.
void pbkdf2_hmac_sha256(std::span<const std::uint8_t> password,
                        std::span<const std::uint8_t> salt,
                        std::uint32_t iterations,
                        std::span<std::uint8_t> out);

} // namespace embedkey::crypto
