#include <doctest.h>

#include <stdexcept>

#include <random>

#include "embedkey/hash.hpp"
#include "embedkey/hex.hpp"
#include "oracle.hpp"

using namespace embedkey;

namespace {

std::string h(std::span<const std::uint8_t> d)
{
    return to_hex(d);
}

oracle::Bytes random_bytes(std::mt19937_64& rng, std::size_t n)
{
    oracle::Bytes b(n);
    for (auto& c : b) c = std::uint8_t(rng());
    return b;
}

} // namespace

TEST_SUITE("hash")
{
    TEST_CASE("sha256 published vectors")
    {
        CHECK(h(crypto::sha256(to_bytes(""))) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(h(crypto::sha256(to_bytes("abc"))) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(h(crypto::sha256(to_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))) ==
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    }

    TEST_CASE("ripemd160 published vectors")
    {
        CHECK(h(crypto::ripemd160(to_bytes(""))) == "9c1185a5c5e9fc54612808977ee8f548b2258d31");
        CHECK(h(crypto::ripemd160(to_bytes("abc"))) == "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc");
        CHECK(h(crypto::ripemd160(to_bytes("message digest"))) == "5d0689ef49d2fae572b881b123a85ffa21595f36");
    }

    TEST_CASE("sha256 and ripemd160 match OpenSSL for lengths 0..300 with split updates")
    {
        std::mt19937_64 rng(11);
        for (std::size_t n = 0; n <= 300; ++n) {
            auto data = random_bytes(rng, n);
            std::size_t split = n ? rng() % (n + 1) : 0;
            std::span<const std::uint8_t> all(data);
            auto s = crypto::Sha256().update(all.first(split)).update(all.subspan(split)).finish();
            auto r = crypto::Ripemd160().update(all.first(split)).update(all.subspan(split)).finish();
            REQUIRE(h(s) == oracle::hex(oracle::sha256(data)));
            REQUIRE(h(r) == oracle::hex(oracle::ripemd160(data)));
        }
    }

    TEST_CASE("hmac-sha256 matches OpenSSL, including keys longer than a block")
    {
        std::mt19937_64 rng(12);
        for (std::size_t klen : {0u, 1u, 32u, 63u, 64u, 65u, 131u}) {
            auto key = random_bytes(rng, klen);
            auto msg = random_bytes(rng, rng() % 200);
            CHECK(h(crypto::hmac_sha256(key, msg)) == oracle::hex(oracle::hmac_sha256(key, msg)));
        }
        // RFC 4231 test case 2
        CHECK(h(crypto::hmac_sha256(to_bytes("Jefe"), to_bytes("what do ya want for nothing?"))) ==
              "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
    }

    TEST_CASE("pbkdf2-hmac-sha256 vectors")
    {
        std::array<std::uint8_t, 32> out;
        crypto::pbkdf2_hmac_sha256(to_bytes("password"), to_bytes("salt"), 1, out);
        CHECK(h(out) == "120fb6cffcf8b32c43e7225256c4f837a86548c92ccc35480805987cb70be17b");
        crypto::pbkdf2_hmac_sha256(to_bytes("password"), to_bytes("salt"), 2, out);
        CHECK(h(out) == "ae4d0c95af6b46d32d0adff928f06dd02a303f8ef3c251dfd6e2d85a95474c43");
        crypto::pbkdf2_hmac_sha256(to_bytes("password"), to_bytes("salt"), 4096, out);
        CHECK(h(out) == "c5e478d59288c841aa530db6845c4c8d962893a001ce4e11a4963873aa98134a");
    }

    TEST_CASE("pbkdf2 matches OpenSSL for multi-block output lengths")
    {
        std::mt19937_64 rng(13);
        for (std::size_t len : {1u, 20u, 32u, 33u, 64u, 70u}) {
            auto pw = random_bytes(rng, rng() % 80);
            auto salt = random_bytes(rng, rng() % 40);
            unsigned iters = 1 + unsigned(rng() % 50);
            std::vector<std::uint8_t> out(len);
            crypto::pbkdf2_hmac_sha256(pw, salt, iters, out);
            CHECK(to_hex(out) == oracle::hex(oracle::pbkdf2_sha256(pw, salt, iters, len)));
        }
    }

    TEST_CASE("pbkdf2 rejects zero iterations")
    {
        std::array<std::uint8_t, 32> out;
        CHECK_THROWS_AS(crypto::pbkdf2_hmac_sha256(to_bytes("pw"), to_bytes("salt"), 0, out), std::invalid_argument);
    }
}
