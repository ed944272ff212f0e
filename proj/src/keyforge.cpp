#include "embedkey/keyforge.hpp"

#include <algorithm>
#include <stdexcept>

#include "embedkey/error.hpp"

namespace embedkey {

using ec::U256;

namespace {

crypto::Digest32 sha256d(std::span<const std::uint8_t> data)
{
    crypto::Digest32 once = crypto::sha256(data);
    return crypto::sha256(once);
}

bool valid_scalar(const U256& v)
{
    return !v.is_zero() && v < ec::kGroupOrder;
}

// d = 0 or d >= n  ->  int(SHA-256(material)) mod (n - 1) + 1
U256 remap_into_range(std::span<const std::uint8_t> material)
{
    U256 h = U256::from_be_bytes(crypto::sha256(material));
    U256 n_minus_1;
    ec::sub_borrow(ec::kGroupOrder, U256{1}, n_minus_1);
    // h < 2^256 < 2 (n - 1), so one subtraction reduces it.
    if (h >= n_minus_1) ec::sub_borrow(h, n_minus_1, h);
    ec::add_carry(h, U256{1}, h);
    return h;
}

U256 digest_to_scalar(const crypto::Digest32& digest)
{
    return ec::group_order().reduce(U256::from_be_bytes(digest));
}

} // namespace

PrivateKey::PrivateKey(const U256& d) : d_(d)
{
    if (!valid_scalar(d)) throw std::invalid_argument("private key must satisfy 1 <= d <= n-1");
}

PrivateKey PrivateKey::from_hex(std::string_view hex)
{
    if (hex.size() != 64) throw FormatError("private_key", "private key hex must be 64 digits");
    return PrivateKey(U256::from_hex(hex));
}

PublicKey::PublicKey(const ec::Point& point) : point_(point)
{
    if (!ec::on_curve(point)) throw std::invalid_argument("public key is not on secp256k1");
}

PublicKey PublicKey::parse(std::span<const std::uint8_t> sec)
{
    if (sec.size() == 65 && sec[0] == 0x04) {
        ec::Point p{U256::from_be_bytes(sec.subspan<1, 32>()), U256::from_be_bytes(sec.subspan<33, 32>()), false};
        return PublicKey(p);
    }
    if (sec.size() == 33 && (sec[0] == 0x02 || sec[0] == 0x03)) {
        auto p = ec::lift_x(U256::from_be_bytes(sec.subspan<1, 32>()), sec[0] == 0x03);
        if (!p) throw std::invalid_argument("compressed public key x is not on secp256k1");
        return PublicKey(*p);
    }
    throw FormatError("pubkey", "public key must be 33-byte compressed or 65-byte uncompressed SEC1");
}

Bytes PublicKey::serialize(bool compressed) const
{
    auto x = point_.x.to_be_bytes();
    Bytes out;
    if (compressed) {
        out.push_back(point_.y.is_odd() ? 0x03 : 0x02);
        out.insert(out.end(), x.begin(), x.end());
    } else {
        auto y = point_.y.to_be_bytes();
        out.push_back(0x04);
        out.insert(out.end(), x.begin(), x.end());
        out.insert(out.end(), y.begin(), y.end());
    }
    return out;
}

std::array<std::uint8_t, 64> Signature::compact() const
{
    std::array<std::uint8_t, 64> out;
    auto rb = r.to_be_bytes();
    auto sb = s.to_be_bytes();
    std::copy(rb.begin(), rb.end(), out.begin());
    std::copy(sb.begin(), sb.end(), out.begin() + 32);
    return out;
}

Signature Signature::from_compact(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() != 64) throw FormatError("signature", "signature must be 64 bytes (r || s)");
    return Signature{U256::from_be_bytes(bytes.subspan<0, 32>()), U256::from_be_bytes(bytes.subspan<32, 32>())};
}

Secret secret_from_code(const BinaryCode& code)
{
    if (code.dim() != 256) throw std::invalid_argument("secret_from_code: code must have 256 bits");
    Secret s;
    std::copy(code.bytes().begin(), code.bytes().end(), s.begin());
    return s;
}

Secret pbkdf2_derive(std::span<const std::uint8_t> password,
                     std::span<const std::uint8_t> salt,
                     std::uint32_t iterations)
{
    Secret out;
    crypto::pbkdf2_hmac_sha256(password, salt, iterations, out);
    return out;
}

PrivateKey derive_private_key(const BinaryCode& code,
                              const std::optional<Bytes>& password,
                              std::span<const std::uint8_t> salt,
                              std::uint32_t iterations)
{
    const Secret secret = secret_from_code(code);
    Bytes material(secret.begin(), secret.end());
    U256 d;
    if (password) {
        Secret stretched = pbkdf2_derive(*password, salt, iterations);
        material.insert(material.end(), stretched.begin(), stretched.end());
        d = U256::from_be_bytes(crypto::sha256(material));
    } else {
        d = U256::from_be_bytes(secret);
    }
    if (!valid_scalar(d)) d = remap_into_range(material);
    return PrivateKey(d);
}

PublicKey derive_public_key(const PrivateKey& priv)
{
    return PublicKey(ec::mul(priv.scalar(), ec::generator()));
}

U256 deterministic_nonce(const PrivateKey& priv, const crypto::Digest32& digest, unsigned attempt)
{
    const Secret x = priv.bytes();
    const auto h1 = digest_to_scalar(digest).to_be_bytes(); // bits2octets
    std::array<std::uint8_t, 32> v;
    std::array<std::uint8_t, 32> k;
    v.fill(0x01);
    k.fill(0x00);
    const std::uint8_t zero = 0x00, one = 0x01;

    k = crypto::HmacSha256(k).update(v).update({&zero, 1}).update(x).update(h1).finish();
    v = crypto::hmac_sha256(k, v);
    k = crypto::HmacSha256(k).update(v).update({&one, 1}).update(x).update(h1).finish();
    v = crypto::hmac_sha256(k, v);

    for (unsigned produced = 0;;) {
        v = crypto::hmac_sha256(k, v);
        U256 candidate = U256::from_be_bytes(v);
        if (valid_scalar(candidate) && produced++ == attempt) return candidate;
        k = crypto::HmacSha256(k).update(v).update({&zero, 1}).finish();
        v = crypto::hmac_sha256(k, v);
    }
}

Signature sign(const PrivateKey& priv, std::span<const std::uint8_t> message)
{
    const ec::Modulus& order = ec::group_order();
    const crypto::Digest32 digest = sha256d(message);
    const U256 z = digest_to_scalar(digest);

    for (unsigned attempt = 0;; ++attempt) {
        U256 k = deterministic_nonce(priv, digest, attempt);
        ec::Point big_r = ec::mul(k, ec::generator());
        U256 r = order.reduce(big_r.x);
        if (r.is_zero()) continue;
        U256 s = order.mul(order.inv(k), order.add(z, order.mul(r, priv.scalar())));
        if (s.is_zero()) continue;
        if (s > ec::shr1(ec::kGroupOrder)) s = order.neg(s);
        return Signature{r, s};
    }
}

bool verify(const PublicKey& pub, std::span<const std::uint8_t> message, const Signature& sig)
{
    if (!valid_scalar(sig.r) || !valid_scalar(sig.s)) return false;
    const ec::Modulus& order = ec::group_order();
    const U256 z = digest_to_scalar(sha256d(message));
    const U256 w = order.inv(sig.s);
    ec::Point x = ec::mul_add(order.mul(z, w), order.mul(sig.r, w), pub.point());
    if (x.infinity) return false;
    return order.reduce(x.x) == sig.r;
}

} // namespace embedkey
