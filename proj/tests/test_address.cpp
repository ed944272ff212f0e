#include <doctest.h>

#include <random>

#include "embedkey/address.hpp"
#include "embedkey/error.hpp"
#include "oracle.hpp"

using namespace embedkey;

namespace {

constexpr std::string_view kAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

Bytes random_bytes(std::mt19937_64& rng, std::size_t n)
{
    Bytes b(n);
    for (auto& x : b) x = std::uint8_t(rng());
    return b;
}

oracle::Bytes ob(std::span<const std::uint8_t> b) { return {b.begin(), b.end()}; }

} // namespace

TEST_SUITE("address")
{
    TEST_CASE("hash160 and sha256d vectors")
    {
        CHECK(to_hex(hash160({})) == "b472a266d0bd89c13706a4132ccfb16f7c3b9fcb");
        CHECK(to_hex(sha256d(to_bytes("hello"))) ==
              "9595c9df90075148eb06860365df33584b75bff782a510c6cd4883a419833d50");
        CHECK(sha256d(to_bytes("hello")) != crypto::sha256(to_bytes("hello")));

        std::mt19937_64 rng(1);
        for (int t = 0; t < 20; ++t) {
            Bytes data = random_bytes(rng, rng() % 200);
            CHECK(to_hex(hash160(data)) == oracle::hex(oracle::ripemd160(oracle::sha256(ob(data)))));
            CHECK(to_hex(sha256d(data)) == oracle::hex(oracle::sha256(oracle::sha256(ob(data)))));
            CHECK(to_hex(hash160(data)) != to_hex(crypto::ripemd160(data)));
        }
    }

    TEST_CASE("base58 matches a big-integer oracle")
    {
        std::mt19937_64 rng(2);
        for (int t = 0; t < 200; ++t) {
            Bytes data = random_bytes(rng, rng() % 50);
            for (std::size_t i = 0; i < data.size() && t % 3 == 0 && i < 3; ++i) data[i] = 0;
            std::string text = base58_encode(data);
            CHECK(text == oracle::base58(ob(data)));
            CHECK(base58_decode(text) == data);
        }
        CHECK(base58_encode({}).empty());
        CHECK(base58_decode("").empty());
    }

    TEST_CASE("base58check vector and alphabet")
    {
        CHECK(base58check_encode(0, Bytes(20, 0)) == "1111111111111111111114oLvT2");
        std::mt19937_64 rng(3);
        for (int t = 0; t < 100; ++t) {
            std::uint8_t version = std::uint8_t(rng());
            Bytes payload = random_bytes(rng, 20);
            std::string text = base58check_encode(version, payload);
            CHECK(text.find_first_of("0OIl") == std::string::npos);
            auto [v, p] = base58check_decode(text);
            CHECK(v == version);
            CHECK(p == payload);
        }
    }

    TEST_CASE("round trip for payloads of 0..64 bytes")
    {
        std::mt19937_64 rng(4);
        for (std::size_t n = 0; n <= 64; ++n) {
            for (int version : {0, 5, 0x80, 0xff}) {
                Bytes payload = random_bytes(rng, n);
                auto [v, p] = base58check_decode(base58check_encode(std::uint8_t(version), payload));
                CHECK(v == version);
                CHECK(p == payload);
            }
        }
    }

    TEST_CASE("every single-character substitution is detected")
    {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 10; ++t) {
            std::string text = base58check_encode(0, random_bytes(rng, 20));
            for (std::size_t pos = 0; pos < text.size(); ++pos) {
                std::string edited = text;
                char c;
                do c = kAlphabet[rng() % kAlphabet.size()];
                while (c == text[pos]);
                edited[pos] = c;
                bool detected = false;
                try {
                    base58check_decode(edited);
                } catch (const ChecksumError&) {
                    detected = true;
                } catch (const FormatError&) {
                    detected = true;
                }
                CHECK_MESSAGE(detected, edited);
            }
        }
    }

    TEST_CASE("characters outside the alphabet are format errors")
    {
        std::string text = base58check_encode(0, Bytes(20, 7));
        for (char bad : {'0', 'O', 'I', 'l', ' ', '+'}) {
            std::string edited = text;
            edited[5] = bad;
            CHECK_THROWS_AS(base58check_decode(edited), FormatError);
        }
        CHECK_THROWS_AS(base58check_decode("1111"), FormatError);
    }

    TEST_CASE("checksum catches single-byte payload corruption")
    {
        std::mt19937_64 rng(6);
        int detected = 0;
        constexpr int kTrials = 10000;
        for (int t = 0; t < kTrials; ++t) {
            Bytes payload = random_bytes(rng, 20);
            Bytes framed{0};
            framed.insert(framed.end(), payload.begin(), payload.end());
            auto check = sha256d(framed);
            framed.insert(framed.end(), check.begin(), check.begin() + 4);
            std::size_t pos = 1 + rng() % 20;
            framed[pos] ^= std::uint8_t(1 + rng() % 255);
            try {
                base58check_decode(base58_encode(framed));
            } catch (const ChecksumError&) {
                ++detected;
            }
        }
        CHECK(detected == kTrials);
    }

    TEST_CASE("p2pkh addresses")
    {
        PublicKey g = derive_public_key(PrivateKey(ec::U256{1}));
        CHECK(p2pkh_address(g, false).text() == "1EHNa6Q4Jz2uvNExL497mE43ikXhwF6kZm");
        CHECK(p2pkh_address(g, true).text() == "1BgGZ9tcN4rm9KBzDn7KprQz87SZ26SAMH");
        CHECK(p2pkh_address(g, true) != p2pkh_address(g, false));

        Address a = Address::parse("1EHNa6Q4Jz2uvNExL497mE43ikXhwF6kZm");
        CHECK(a == p2pkh_address(g, false));
        CHECK(a.version() == 0);
        CHECK(a.payload() == hash160(g.serialize(false)));
        CHECK(p2pkh_address(g, false, 0x6f).version() == 0x6f);

        CHECK_THROWS_AS(Address::parse(base58check_encode(0, Bytes(19, 1))), FormatError);
        std::string bad = a.text();
        bad.back() = bad.back() == 'm' ? 'n' : 'm';
        CHECK_THROWS_AS(Address::parse(bad), ChecksumError);
    }

    TEST_CASE("WIF")
    {
        PrivateKey one(ec::U256{1});
        CHECK(wif_encode(one, false) == "5HpHagT65TZzG1PH3CSu63k8DbpvD8s5ip4nEB3kEsreAnchuDf");
        CHECK(wif_encode(one, true) == "KwDiBf89QgGbjEhKnhXJuH7LrciVrZi3qYjgd9M7rFU73sVHnoWn");

        std::mt19937_64 rng(7);
        for (int t = 0; t < 20; ++t) {
            ec::U256 d{rng() >> 1, rng(), rng(), rng() | 1};
            PrivateKey k(d);
            for (bool compressed : {false, true}) {
                DecodedWif w = wif_decode(wif_encode(k, compressed));
                CHECK(w.version == kWifVersion);
                CHECK(w.secret == k.bytes());
                CHECK(w.compressed == compressed);
            }
            CHECK(wif_encode(k, true) != wif_encode(k, false));
        }
        CHECK_THROWS_AS(wif_decode(base58check_encode(0x80, Bytes(31, 1))), FormatError);
        Bytes bad_suffix(32, 1);
        bad_suffix.push_back(0x02);
        CHECK_THROWS_AS(wif_decode(base58check_encode(0x80, bad_suffix)), FormatError);
    }
}
