#include "embedkey/hash.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace embedkey::crypto {

namespace {

constexpr std::array<std::uint32_t, 64> kSha256Round = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
};

std::uint32_t load_be32(const std::uint8_t* p)
{
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
           std::uint32_t(p[3]);
}

std::uint32_t load_le32(const std::uint8_t* p)
{
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

void store_be32(std::uint8_t* p, std::uint32_t v)
{
    p[0] = std::uint8_t(v >> 24);
    p[1] = std::uint8_t(v >> 16);
    p[2] = std::uint8_t(v >> 8);
    p[3] = std::uint8_t(v);
}

void store_le32(std::uint8_t* p, std::uint32_t v)
{
    p[0] = std::uint8_t(v);
    p[1] = std::uint8_t(v >> 8);
    p[2] = std::uint8_t(v >> 16);
    p[3] = std::uint8_t(v >> 24);
}

// Shared Merkle-Damgard buffering for the two 64-byte-block hashes.
template <typename Compress>
void absorb(std::span<const std::uint8_t> data, std::array<std::uint8_t, 64>& buffer,
            std::size_t& buffered, std::uint64_t& total, Compress&& compress)
{
    total += data.size();
    std::size_t pos = 0;
    if (buffered > 0) {
        std::size_t take = std::min(data.size(), 64 - buffered);
        std::memcpy(buffer.data() + buffered, data.data(), take);
        buffered += take;
        pos = take;
        if (buffered < 64) return;
        compress(buffer.data());
        buffered = 0;
    }
    for (; pos + 64 <= data.size(); pos += 64) compress(data.data() + pos);
    std::size_t rest = data.size() - pos;
    if (rest > 0) std::memcpy(buffer.data(), data.data() + pos, rest);
    buffered = rest;
}

// Appends 0x80, zero padding and the 64-bit bit length (big or little endian).
template <typename Compress>
void pad(std::array<std::uint8_t, 64>& buffer, std::size_t buffered, std::uint64_t total,
         bool big_endian_length, Compress&& compress)
{
    buffer[buffered++] = 0x80;
    if (buffered > 56) {
        std::fill(buffer.begin() + static_cast<std::ptrdiff_t>(buffered), buffer.end(), 0);
        compress(buffer.data());
        buffered = 0;
    }
    std::fill(buffer.begin() + static_cast<std::ptrdiff_t>(buffered), buffer.begin() + 56, 0);
    std::uint64_t bits = total * 8;
    for (int i = 0; i < 8; ++i) {
        int shift = big_endian_length ? 56 - 8 * i : 8 * i;
        buffer[56 + i] = std::uint8_t(bits >> shift);
    }
    compress(buffer.data());
}

} // namespace

// ---------------------------------------------------------------- SHA-256

Sha256::Sha256()
    : state_{0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
             0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19}
{
}

void Sha256::compress(const std::uint8_t* block)
{
    std::array<std::uint32_t, 64> w;
    for (int i = 0; i < 16; ++i) w[i] = load_be32(block + 4 * i);
    for (int i = 16; i < 64; ++i) {
        std::uint32_t s0 = std::rotr(w[i - 15], 7) ^ std::rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        std::uint32_t s1 = std::rotr(w[i - 2], 17) ^ std::rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }

    auto [a, b, c, d, e, f, g, h] = state_;
    for (int i = 0; i < 64; ++i) {
        std::uint32_t S1 = std::rotr(e, 6) ^ std::rotr(e, 11) ^ std::rotr(e, 25);
        std::uint32_t ch = (e & f) ^ (~e & g);
        std::uint32_t t1 = h + S1 + ch + kSha256Round[i] + w[i];
        std::uint32_t S0 = std::rotr(a, 2) ^ std::rotr(a, 13) ^ std::rotr(a, 22);
        std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        std::uint32_t t2 = S0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
    state_[5] += f;
    state_[6] += g;
    state_[7] += h;
}

Sha256& Sha256::update(std::span<const std::uint8_t> data)
{
    absorb(data, buffer_, buffered_, total_, [this](const std::uint8_t* b) { compress(b); });
    return *this;
}

Digest32 Sha256::finish()
{
    pad(buffer_, buffered_, total_, true, [this](const std::uint8_t* b) { compress(b); });
    Digest32 out;
    for (int i = 0; i < 8; ++i) store_be32(out.data() + 4 * i, state_[i]);
    *this = Sha256();
    return out;
}

Digest32 sha256(std::span<const std::uint8_t> data)
{
    return Sha256().update(data).finish();
}

// ------------------------------------------------------------- RIPEMD-160

namespace {

constexpr std::uint8_t kRmdLeftWord[80] = {
    0, 1, 2,  3,  4,  5,  6,  7,  8, 9, 10, 11, 12, 13, 14, 15,
    7, 4, 13, 1,  10, 6,  15, 3,  12, 0, 9,  5,  2,  14, 11, 8,
    3, 10, 14, 4, 9,  15, 8,  1,  2, 7, 0,  6,  13, 11, 5,  12,
    1, 9, 11, 10, 0,  8,  12, 4,  13, 3, 7,  15, 14, 5,  6,  2,
    4, 0, 5,  9,  7,  12, 2,  10, 14, 1, 3,  8,  11, 6,  15, 13};
constexpr std::uint8_t kRmdRightWord[80] = {
    5,  14, 7,  0, 9, 2,  11, 4,  13, 6,  15, 8,  1,  10, 3,  12,
    6,  11, 3,  7, 0, 13, 5,  10, 14, 15, 8,  12, 4,  9,  1,  2,
    15, 5,  1,  3, 7, 14, 6,  9,  11, 8,  12, 2,  10, 0,  4,  13,
    8,  6,  4,  1, 3, 11, 15, 0,  5,  12, 2,  13, 9,  7,  10, 14,
    12, 15, 10, 4, 1, 5,  8,  7,  6,  2,  13, 14, 0,  3,  9,  11};
constexpr std::uint8_t kRmdLeftShift[80] = {
    11, 14, 15, 12, 5,  8,  7,  9,  11, 13, 14, 15, 6,  7,  9,  8,
    7,  6,  8,  13, 11, 9,  7,  15, 7,  12, 15, 9,  11, 7,  13, 12,
    11, 13, 6,  7,  14, 9,  13, 15, 14, 8,  13, 6,  5,  12, 7,  5,
    11, 12, 14, 15, 14, 15, 9,  8,  9,  14, 5,  6,  8,  6,  5,  12,
    9,  15, 5,  11, 6,  8,  13, 12, 5,  12, 13, 14, 11, 8,  5,  6};
constexpr std::uint8_t kRmdRightShift[80] = {
    8,  9,  9,  11, 13, 15, 15, 5,  7,  7,  8,  11, 14, 14, 12, 6,
    9,  13, 15, 7,  12, 8,  9,  11, 7,  7,  12, 7,  6,  15, 13, 11,
    9,  7,  15, 11, 8,  6,  6,  14, 12, 13, 5,  14, 13, 13, 7,  5,
    15, 5,  8,  11, 14, 14, 6,  14, 6,  9,  12, 9,  12, 5,  15, 8,
    8,  5,  12, 9,  12, 5,  14, 6,  8,  13, 6,  5,  15, 13, 11, 11};
constexpr std::uint32_t kRmdLeftConst[5] = {0x00000000, 0x5a827999, 0x6ed9eba1, 0x8f1bbcdc, 0xa953fd4e};
constexpr std::uint32_t kRmdRightConst[5] = {0x50a28be6, 0x5c4dd124, 0x6d703ef3, 0x7a6d76e9, 0x00000000};

std::uint32_t rmd_f(int round, std::uint32_t x, std::uint32_t y, std::uint32_t z)
{
    switch (round) {
    case 0: return x ^ y ^ z;
    case 1: return (x & y) | (~x & z);
    case 2: return (x | ~y) ^ z;
    case 3: return (x & z) | (y & ~z);
    default: return x ^ (y | ~z);
    }
}

} // namespace

Ripemd160::Ripemd160() : state_{0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476, 0xc3d2e1f0} {}

void Ripemd160::compress(const std::uint8_t* block)
{
    std::uint32_t x[16];
    for (int i = 0; i < 16; ++i) x[i] = load_le32(block + 4 * i);

    std::uint32_t al = state_[0], bl = state_[1], cl = state_[2], dl = state_[3], el = state_[4];
    std::uint32_t ar = al, br = bl, cr = cl, dr = dl, er = el;
    for (int j = 0; j < 80; ++j) {
        int round = j / 16;
        std::uint32_t t = std::rotl(al + rmd_f(round, bl, cl, dl) + x[kRmdLeftWord[j]] + kRmdLeftConst[round],
                                    kRmdLeftShift[j]) + el;
        al = el;
        el = dl;
        dl = std::rotl(cl, 10);
        cl = bl;
        bl = t;

        t = std::rotl(ar + rmd_f(4 - round, br, cr, dr) + x[kRmdRightWord[j]] + kRmdRightConst[round],
                      kRmdRightShift[j]) + er;
        ar = er;
        er = dr;
        dr = std::rotl(cr, 10);
        cr = br;
        br = t;
    }
    std::uint32_t t = state_[1] + cl + dr;
    state_[1] = state_[2] + dl + er;
    state_[2] = state_[3] + el + ar;
    state_[3] = state_[4] + al + br;
    state_[4] = state_[0] + bl + cr;
    state_[0] = t;
}

Ripemd160& Ripemd160::update(std::span<const std::uint8_t> data)
{
    absorb(data, buffer_, buffered_, total_, [this](const std::uint8_t* b) { compress(b); });
    return *this;
}

Digest20 Ripemd160::finish()
{
    pad(buffer_, buffered_, total_, false, [this](const std::uint8_t* b) { compress(b); });
    Digest20 out;
    for (int i = 0; i < 5; ++i) store_le32(out.data() + 4 * i, state_[i]);
    *this = Ripemd160();
    return out;
}

Digest20 ripemd160(std::span<const std::uint8_t> data)
{
    return Ripemd160().update(data).finish();
}

// ---------------------------------------------------------- HMAC / PBKDF2

HmacSha256::HmacSha256(std::span<const std::uint8_t> key)
{
    std::array<std::uint8_t, 64> block{};
    if (key.size() > block.size()) {
        Digest32 hashed = sha256(key);
        std::copy(hashed.begin(), hashed.end(), block.begin());
    } else {
        std::copy(key.begin(), key.end(), block.begin());
    }
    std::array<std::uint8_t, 64> ipad, opad;
    for (std::size_t i = 0; i < block.size(); ++i) {
        ipad[i] = block[i] ^ 0x36;
        opad[i] = block[i] ^ 0x5c;
    }
    inner_.update(ipad);
    outer_.update(opad);
}

HmacSha256& HmacSha256::update(std::span<const std::uint8_t> data)
{
    inner_.update(data);
    return *this;
}

Digest32 HmacSha256::finish()
{
    Digest32 inner = inner_.finish();
    return outer_.update(inner).finish();
}

Digest32 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data)
{
    return HmacSha256(key).update(data).finish();
}

void pbkdf2_hmac_sha256(std::span<const std::uint8_t> password,
                        std::span<const std::uint8_t> salt,
                        std::uint32_t iterations,
                        std::span<std::uint8_t> out)
{
    if (iterations == 0) throw std::invalid_argument("pbkdf2: iterations must be >= 1");

    // Keyed state is prepared once; each PRF call copies it.
    const HmacSha256 keyed(password);
    std::uint32_t block_index = 1;
    for (std::size_t pos = 0; pos < out.size(); pos += 32, ++block_index) {
        std::uint8_t index_be[4];
        store_be32(index_be, block_index);
        Digest32 u = HmacSha256(keyed).update(salt).update(index_be).finish();
        Digest32 acc = u;
        for (std::uint32_t i = 1; i < iterations; ++i) {
            u = HmacSha256(keyed).update(u).finish();
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] ^= u[j];
        }
        std::size_t take = std::min<std::size_t>(32, out.size() - pos);
        std::copy_n(acc.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(pos));
    }
}

} // namespace embedkey::crypto
