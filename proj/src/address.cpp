#include "embedkey/address.hpp"

#include <algorithm>

#include "embedkey/error.hpp"

namespace embedkey {

namespace {

constexpr std::string_view kAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

int alphabet_index(char c)
{
    auto pos = kAlphabet.find(c);
    return pos == std::string_view::npos ? -1 : int(pos);
}

} // namespace

Hash160 hash160(std::span<const std::uint8_t> data)
{
    crypto::Digest32 inner = crypto::sha256(data);
    return crypto::ripemd160(inner);
}

crypto::Digest32 sha256d(std::span<const std::uint8_t> data)
{
    crypto::Digest32 once = crypto::sha256(data);
    return crypto::sha256(once);
}

std::string base58_encode(std::span<const std::uint8_t> data)
{
    std::size_t zeros = 0;
    while (zeros < data.size() && data[zeros] == 0) ++zeros;

    // Base-58 digits, least significant first; repeated multiply-add.
    std::vector<std::uint8_t> digits;
    digits.reserve(data.size() * 138 / 100 + 1);
    for (std::size_t i = zeros; i < data.size(); ++i) {
        unsigned carry = data[i];
        for (auto& d : digits) {
            carry += unsigned(d) << 8;
            d = std::uint8_t(carry % 58);
            carry /= 58;
        }
        while (carry > 0) {
            digits.push_back(std::uint8_t(carry % 58));
            carry /= 58;
        }
    }

    std::string out(zeros, '1');
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kAlphabet[*it]);
    return out;
}

Bytes base58_decode(std::string_view text)
{
    std::size_t ones = 0;
    while (ones < text.size() && text[ones] == '1') ++ones;

    std::vector<std::uint8_t> bytes; // least significant first
    for (std::size_t i = ones; i < text.size(); ++i) {
        int v = alphabet_index(text[i]);
        if (v < 0)
            throw FormatError("base58", "invalid base58 character '" + std::string(1, text[i]) + "' at position " +
                                            std::to_string(i));
        unsigned carry = unsigned(v);
        for (auto& b : bytes) {
            carry += unsigned(b) * 58;
            b = std::uint8_t(carry & 0xff);
            carry >>= 8;
        }
        while (carry > 0) {
            bytes.push_back(std::uint8_t(carry & 0xff));
            carry >>= 8;
        }
    }

    Bytes out(ones, 0);
    out.insert(out.end(), bytes.rbegin(), bytes.rend());
    return out;
}

std::string base58check_encode(std::uint8_t version, std::span<const std::uint8_t> payload)
{
    Bytes data;
    data.reserve(payload.size() + 5);
    data.push_back(version);
    data.insert(data.end(), payload.begin(), payload.end());
    crypto::Digest32 check = sha256d(data);
    data.insert(data.end(), check.begin(), check.begin() + 4);
    return base58_encode(data);
}

std::pair<std::uint8_t, Bytes> base58check_decode(std::string_view text)
{
    Bytes data = base58_decode(text);
    if (data.size() < 5) throw FormatError("base58", "base58check data shorter than version + checksum");
    const std::size_t body = data.size() - 4;
    crypto::Digest32 check = sha256d(std::span(data).first(body));
    if (!std::equal(check.begin(), check.begin() + 4, data.begin() + static_cast<std::ptrdiff_t>(body)))
        throw ChecksumError("base58check checksum mismatch");
    return {data[0], Bytes(data.begin() + 1, data.begin() + static_cast<std::ptrdiff_t>(body))};
}

Address::Address(std::uint8_t version, const Hash160& payload)
    : version_(version), payload_(payload), text_(base58check_encode(version, payload))
{
}

Address Address::parse(std::string_view text)
{
    auto [version, payload] = base58check_decode(text);
    if (payload.size() != 20) throw FormatError("address", "address payload must be 20 bytes");
    Hash160 h;
    std::copy(payload.begin(), payload.end(), h.begin());
    return Address(version, h);
}

Address p2pkh_address(const PublicKey& pub, bool compressed, std::uint8_t version)
{
    return Address(version, hash160(pub.serialize(compressed)));
}

std::string wif_encode(const PrivateKey& priv, bool compressed, std::uint8_t version)
{
    Secret s = priv.bytes();
    Bytes payload(s.begin(), s.end());
    if (compressed) payload.push_back(0x01);
    return base58check_encode(version, payload);
}

DecodedWif wif_decode(std::string_view text)
{
    auto [version, payload] = base58check_decode(text);
    bool compressed = payload.size() == 33;
    if (!(payload.size() == 32 || (compressed && payload[32] == 0x01)))
        throw FormatError("wif", "WIF payload must be 32 bytes, or 33 bytes ending in 0x01");
    DecodedWif out{version, {}, compressed};
    std::copy_n(payload.begin(), 32, out.secret.begin());
    return out;
}

} // namespace embedkey
