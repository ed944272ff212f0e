#define OPENSSL_SUPPRESS_DEPRECATED
#include "oracle.hpp"

#include <gmp.h>
#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/ecdsa.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/provider.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace oracle {

namespace {

struct Mpz {
    mpz_t v;
    Mpz() { mpz_init(v); }
    explicit Mpz(const std::string& hex) { mpz_init_set_str(v, hex.c_str(), 16); }
    ~Mpz() { mpz_clear(v); }
    Mpz(const Mpz&) = delete;
    Mpz& operator=(const Mpz&) = delete;

    std::string hex64() const
    {
        char* s = mpz_get_str(nullptr, 16, v);
        std::string out(s);
        void (*freefunc)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefunc);
        freefunc(s, out.size() + 1);
        if (out.size() < 64) out.insert(0, 64 - out.size(), '0');
        return out;
    }
};

Bytes digest(const EVP_MD* md, const Bytes& data)
{
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned len = 0;
    if (!EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr))
        throw std::runtime_error("EVP_Digest failed");
    out.resize(len);
    return out;
}

EC_GROUP* secp256k1_group()
{
    static EC_GROUP* g = EC_GROUP_new_by_curve_name(NID_secp256k1);
    return g;
}

std::string bn_hex64(const BIGNUM* bn)
{
    Bytes b(32);
    BN_bn2binpad(bn, b.data(), 32);
    return hex(b);
}

} // namespace

std::string hex(const Bytes& b)
{
    std::string s;
    char buf[3];
    for (auto c : b) {
        std::snprintf(buf, sizeof buf, "%02x", c);
        s += buf;
    }
    return s;
}

Bytes unhex(const std::string& h)
{
    Bytes out;
    for (std::size_t i = 0; i + 1 < h.size(); i += 2) out.push_back(std::uint8_t(std::stoul(h.substr(i, 2), nullptr, 16)));
    return out;
}

Bytes bytes(const std::string& s)
{
    return Bytes(s.begin(), s.end());
}

Bytes sha256(const Bytes& data)
{
    return digest(EVP_sha256(), data);
}

Bytes ripemd160(const Bytes& data)
{
    static OSSL_PROVIDER* legacy = OSSL_PROVIDER_load(nullptr, "legacy");
    static OSSL_PROVIDER* deflt = OSSL_PROVIDER_load(nullptr, "default");
    (void)legacy;
    (void)deflt;
    std::unique_ptr<EVP_MD, decltype(&EVP_MD_free)> md(EVP_MD_fetch(nullptr, "RIPEMD160", nullptr), EVP_MD_free);
    if (!md) throw std::runtime_error("RIPEMD160 unavailable in OpenSSL");
    return digest(md.get(), data);
}

Bytes hmac_sha256(const Bytes& key, const Bytes& data)
{
    Bytes out(32);
    unsigned len = 0;
    HMAC(EVP_sha256(), key.data(), int(key.size()), data.data(), data.size(), out.data(), &len);
    return out;
}

Bytes pbkdf2_sha256(const Bytes& password, const Bytes& salt, unsigned iterations, std::size_t len)
{
    Bytes out(len);
    PKCS5_PBKDF2_HMAC(reinterpret_cast<const char*>(password.data()), int(password.size()), salt.data(),
                      int(salt.size()), int(iterations), EVP_sha256(), int(len), out.data());
    return out;
}

std::string base58(const Bytes& data)
{
    static const char* alphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
    std::string out;
    Mpz n;
    if (!data.empty()) mpz_import(n.v, data.size(), 1, 1, 1, 0, data.data());
    while (mpz_sgn(n.v) > 0) {
        unsigned long r = mpz_fdiv_q_ui(n.v, n.v, 58);
        out.insert(out.begin(), alphabet[r]);
    }
    for (auto b : data) {
        if (b != 0) break;
        out.insert(out.begin(), '1');
    }
    return out;
}

Affine scalar_mul_base(const std::string& d_hex)
{
    EC_GROUP* g = secp256k1_group();
    BIGNUM* d = nullptr;
    BN_hex2bn(&d, d_hex.c_str());
    EC_POINT* p = EC_POINT_new(g);
    EC_POINT_mul(g, p, d, nullptr, nullptr, nullptr);
    Affine out;
    if (!EC_POINT_is_at_infinity(g, p)) {
        BIGNUM* x = BN_new();
        BIGNUM* y = BN_new();
        EC_POINT_get_affine_coordinates(g, p, x, y, nullptr);
        out = {bn_hex64(x), bn_hex64(y)};
        BN_free(x);
        BN_free(y);
    }
    EC_POINT_free(p);
    BN_free(d);
    return out;
}

bool mul_base_is_infinity(const std::string& d_hex)
{
    return scalar_mul_base(d_hex).x.empty();
}

bool ecdsa_verify(const Bytes& sec_pubkey, const Bytes& digest32, const std::string& r_hex, const std::string& s_hex)
{
    EC_KEY* key = EC_KEY_new_by_curve_name(NID_secp256k1);
    EC_POINT* p = EC_POINT_new(secp256k1_group());
    bool ok = EC_POINT_oct2point(secp256k1_group(), p, sec_pubkey.data(), sec_pubkey.size(), nullptr) == 1 &&
              EC_KEY_set_public_key(key, p) == 1;
    int result = -1;
    if (ok) {
        BIGNUM* r = nullptr;
        BIGNUM* s = nullptr;
        BN_hex2bn(&r, r_hex.c_str());
        BN_hex2bn(&s, s_hex.c_str());
        ECDSA_SIG* sig = ECDSA_SIG_new();
        ECDSA_SIG_set0(sig, r, s);
        result = ECDSA_do_verify(digest32.data(), int(digest32.size()), sig, key);
        ECDSA_SIG_free(sig);
    }
    EC_POINT_free(p);
    EC_KEY_free(key);
    return result == 1;
}

std::string mod_mul(const std::string& a, const std::string& b, const std::string& m)
{
    Mpz x(a), y(b), mod(m), r;
    mpz_mul(r.v, x.v, y.v);
    mpz_mod(r.v, r.v, mod.v);
    return r.hex64();
}

std::string mod_add(const std::string& a, const std::string& b, const std::string& m)
{
    Mpz x(a), y(b), mod(m), r;
    mpz_add(r.v, x.v, y.v);
    mpz_mod(r.v, r.v, mod.v);
    return r.hex64();
}

std::string mod_sub(const std::string& a, const std::string& b, const std::string& m)
{
    Mpz x(a), y(b), mod(m), r;
    mpz_sub(r.v, x.v, y.v);
    mpz_mod(r.v, r.v, mod.v);
    return r.hex64();
}

std::string mod_inv(const std::string& a, const std::string& m)
{
    Mpz x(a), mod(m), r;
    mpz_invert(r.v, x.v, mod.v);
    return r.hex64();
}

std::string remap_scalar(const Bytes& material, const std::string& n_hex)
{
    Mpz h(hex(sha256(material))), n(n_hex), r;
    mpz_sub_ui(n.v, n.v, 1);
    mpz_mod(r.v, h.v, n.v);
    mpz_add_ui(r.v, r.v, 1);
    return r.hex64();
}

bool on_secp256k1(const std::string& x_hex, const std::string& y_hex)
{
    Mpz p("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f");
    Mpz x(x_hex), y(y_hex), lhs, rhs;
    mpz_powm_ui(lhs.v, y.v, 2, p.v);
    mpz_powm_ui(rhs.v, x.v, 3, p.v);
    mpz_add_ui(rhs.v, rhs.v, 7);
    mpz_mod(rhs.v, rhs.v, p.v);
    return mpz_cmp(lhs.v, rhs.v) == 0;
}

} // namespace oracle
