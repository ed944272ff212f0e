#include "embedkey/uint256.hpp"

#include "embedkey/error.hpp"

namespace embedkey::ec {

namespace {

using u128 = unsigned __int128;

// 512-bit intermediate, least significant limb first.
using Wide = std::array<std::uint64_t, 8>;

Wide mul_wide(const U256& a, const U256& b)
{
    Wide r{};
    for (int i = 0; i < 4; ++i) {
        std::uint64_t carry = 0;
        for (int j = 0; j < 4; ++j) {
            u128 t = u128(a.limb[i]) * b.limb[j] + r[i + j] + carry;
            r[i + j] = std::uint64_t(t);
            carry = std::uint64_t(t >> 64);
        }
        r[i + 4] = carry;
    }
    return r;
}

bool wide_high_zero(const Wide& w)
{
    return (w[4] | w[5] | w[6] | w[7]) == 0;
}

} // namespace

U256 U256::from_be_bytes(std::span<const std::uint8_t, 32> bytes)
{
    U256 r;
    for (int i = 0; i < 32; ++i) {
        int limb = 3 - i / 8;
        r.limb[limb] = (r.limb[limb] << 8) | bytes[i];
    }
    return r;
}

U256 U256::from_hex(std::string_view hex)
{
    if (hex.empty() || hex.size() > 64) throw FormatError("hex", "256-bit hex must have 1..64 digits");
    U256 r;
    for (char c : hex) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw FormatError("hex", "invalid hex character");
        for (int i = 3; i > 0; --i) r.limb[i] = (r.limb[i] << 4) | (r.limb[i - 1] >> 60);
        r.limb[0] = (r.limb[0] << 4) | std::uint64_t(v);
    }
    return r;
}

std::array<std::uint8_t, 32> U256::to_be_bytes() const
{
    std::array<std::uint8_t, 32> out;
    for (int i = 0; i < 32; ++i) out[i] = std::uint8_t(limb[3 - i / 8] >> (56 - 8 * (i % 8)));
    return out;
}

std::string U256::to_hex() const
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (std::uint8_t b : to_be_bytes()) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0x0f]);
    }
    return s;
}

unsigned U256::bit_length() const
{
    for (int i = 3; i >= 0; --i)
        if (limb[i] != 0) return unsigned(64 * i + 64 - __builtin_clzll(limb[i]));
    return 0;
}

std::uint64_t add_carry(const U256& a, const U256& b, U256& out)
{
    std::uint64_t carry = 0;
    for (int i = 0; i < 4; ++i) {
        u128 t = u128(a.limb[i]) + b.limb[i] + carry;
        out.limb[i] = std::uint64_t(t);
        carry = std::uint64_t(t >> 64);
    }
    return carry;
}

std::uint64_t sub_borrow(const U256& a, const U256& b, U256& out)
{
    std::uint64_t borrow = 0;
    for (int i = 0; i < 4; ++i) {
        u128 t = u128(a.limb[i]) - b.limb[i] - borrow;
        out.limb[i] = std::uint64_t(t);
        borrow = std::uint64_t(t >> 64) & 1u;
    }
    return borrow;
}

U256 shr1(const U256& a)
{
    U256 r;
    for (int i = 0; i < 4; ++i) {
        r.limb[i] = a.limb[i] >> 1;
        if (i < 3) r.limb[i] |= a.limb[i + 1] << 63;
    }
    return r;
}

Modulus::Modulus(const U256& m) : m_(m)
{
    sub_borrow(U256{}, m, c_); // 2^256 - m, as the two's complement of m
}

U256 Modulus::reduce(const U256& a) const
{
    if (a < m_) return a;
    U256 r;
    sub_borrow(a, m_, r);
    return r;
}

U256 Modulus::add(const U256& a, const U256& b) const
{
    U256 r;
    std::uint64_t carry = add_carry(a, b, r);
    if (carry || r >= m_) sub_borrow(r, m_, r);
    return r;
}

U256 Modulus::sub(const U256& a, const U256& b) const
{
    U256 r;
    if (sub_borrow(a, b, r)) add_carry(r, m_, r);
    return r;
}

U256 Modulus::neg(const U256& a) const
{
    return a.is_zero() ? a : sub(U256{}, a);
}

U256 Modulus::mul(const U256& a, const U256& b) const
{
    Wide x = mul_wide(a, b);
    // Fold the high half: hi * 2^256 + lo == hi * c + lo. Each pass shrinks
    // the high half by at least 256 - bitlen(c) bits.
    while (!wide_high_zero(x)) {
        U256 hi{x[7], x[6], x[5], x[4]};
        Wide folded = mul_wide(hi, c_);
        std::uint64_t carry = 0;
        for (int i = 0; i < 8; ++i) {
            u128 t = u128(folded[i]) + (i < 4 ? x[i] : 0) + carry;
            folded[i] = std::uint64_t(t);
            carry = std::uint64_t(t >> 64);
        }
        x = folded;
    }
    return reduce(U256{x[3], x[2], x[1], x[0]});
}

U256 Modulus::pow(const U256& base, const U256& exponent) const
{
    U256 result{1};
    U256 b = reduce(base);
    for (int i = int(exponent.bit_length()) - 1; i >= 0; --i) {
        result = sqr(result);
        if (exponent.bit(unsigned(i))) result = mul(result, b);
    }
    return result;
}

U256 Modulus::inv(const U256& a) const
{
    U256 e;
    sub_borrow(m_, U256{2}, e);
    return pow(a, e);
}

} // namespace embedkey::ec
