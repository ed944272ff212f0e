#include <doctest.h>

#include <random>

#include "embedkey/chainsim.hpp"
#include "embedkey/error.hpp"
#include "oracle.hpp"

using namespace embedkey;
using namespace embedkey::chainsim;

namespace {

struct Wallet {
    PrivateKey key;
    PublicKey pub;
    Address address;
};

Wallet wallet(const ec::U256& d)
{
    PrivateKey k(d);
    PublicKey q = derive_public_key(k);
    return Wallet{k, q, p2pkh_address(q, false)};
}

Wallet random_wallet(std::mt19937_64& rng)
{
    return wallet(ec::U256{rng() >> 1, rng(), rng(), rng() | 1});
}

RedeemTx spend(const Wallet& from, const OutPoint& input, const Address& to, std::uint64_t amount)
{
    RedeemTx tx{input, to, amount, from.pub.serialize(false), {}};
    sign_redeem(tx, from.key);
    return tx;
}

std::string sha256d_hex(const std::string& text)
{
    return oracle::hex(oracle::sha256(oracle::sha256(oracle::bytes(text))));
}

std::uint64_t scan_balance(const Ledger& l, const Address& a)
{
    std::uint64_t sum = 0;
    for (const auto& [op, u] : l.utxos())
        if (u.address == a) sum += u.amount;
    return sum;
}

} // namespace

TEST_SUITE("chainsim")
{
    TEST_CASE("new ledgers are empty and independent")
    {
        Ledger a, b;
        Wallet w = wallet(ec::U256{1});
        CHECK(a.balance(w.address) == 0);
        CHECK(a.total_supply() == 0);
        a.fund(w.address, 5);
        CHECK(b.balance(w.address) == 0);
        CHECK(Ledger::from_json(b.to_json()).to_json() == b.to_json());
    }

    TEST_CASE("fund txid and sighash vectors")
    {
        Wallet one = wallet(ec::U256{1}), two = wallet(ec::U256{2});
        TxId id = fund_txid(one.address, 50, 0);
        CHECK(to_hex(id) == "1cb0ea5d9d81b59ce0fb0cfeaba9cd1fe6a5d1c93c37f0594b551dac2882004b");
        CHECK(to_hex(id) == sha256d_hex(one.address.text() + "|50|0"));

        RedeemTx tx{OutPoint{id, 0}, two.address, 50, one.pub.serialize(false), {}};
        std::string preimage = to_hex(id) + ":0|" + two.address.text() + "|50|" + to_hex(one.pub.serialize(false));
        CHECK(sighash_preimage(tx) == preimage);
        CHECK(to_hex(sighash(tx)) == "6f5258dc07a5fccd8fa6be6bc81b870063f4c2ac8c696e919e86530b9610815e");
        CHECK(to_hex(sighash(tx)) == sha256d_hex(preimage));

        RedeemTx same = tx;
        CHECK(sighash(same) == sighash(tx));
        same.destination = one.address;
        CHECK(sighash(same) != sighash(tx));

        sign_redeem(tx, one.key);
        CHECK(to_hex(redeem_txid(tx)) == sha256d_hex(preimage + "|" + to_hex(tx.signature.compact())));
    }

    TEST_CASE("fund")
    {
        Ledger l;
        Wallet w = wallet(ec::U256{7});
        TxId a = l.fund(w.address, 50);
        CHECK(l.balance(w.address) == 50);
        TxId b = l.fund(w.address, 50);
        CHECK(a != b);
        CHECK(l.balance(w.address) == 100);
        CHECK(a == fund_txid(w.address, 50, 0));
        CHECK(b == fund_txid(w.address, 50, 1));
        CHECK_THROWS_AS(l.fund(w.address, 0), std::invalid_argument);
        CHECK_THROWS_AS(l.fund(w.address, -3), std::invalid_argument);
        CHECK(l.history().size() == 2);
    }

    TEST_CASE("redeem accepts a valid spend and rejects each failure")
    {
        Ledger l;
        Wallet a = wallet(ec::U256{11}), b = wallet(ec::U256{12}), c = wallet(ec::U256{13});
        TxId funded = l.fund(a.address, 50);
        OutPoint op{funded, 0};

        CHECK(l.redeem(spend(a, OutPoint{funded, 1}, b.address, 50)).rejection == Rejection::UnknownInput);
        CHECK(l.redeem(spend(c, op, b.address, 50)).rejection == Rejection::PubkeyHashMismatch);

        RedeemTx forged = spend(a, op, b.address, 50);
        forged.signature = sign(c.key, std::span<const std::uint8_t>(sighash(forged)));
        CHECK(l.redeem(forged).rejection == Rejection::BadSignature);

        RedeemTx redirected = spend(a, op, b.address, 50);
        redirected.destination = c.address; // signature covers the original destination
        CHECK(l.redeem(redirected).rejection == Rejection::BadSignature);

        RedeemTx garbage_key = spend(a, op, b.address, 50);
        garbage_key.pubkey = Bytes{0x05, 0x01};
        CHECK(l.redeem(garbage_key).rejection == Rejection::PubkeyHashMismatch);

        CHECK(l.redeem(spend(a, op, b.address, 49)).rejection == Rejection::AmountMismatch);
        CHECK(l.balance(a.address) == 50);

        RedeemTx good = spend(a, op, b.address, 50);
        RedeemResult r = l.redeem(good);
        REQUIRE(r.accepted());
        CHECK(r.txid == redeem_txid(good));
        CHECK(l.balance(a.address) == 0);
        CHECK(l.balance(b.address) == 50);
        CHECK(l.spent(op));
        CHECK(l.find(OutPoint{r.txid, 0})->amount == 50);
        CHECK(l.redeem(good).rejection == Rejection::DoubleSpend);
        CHECK(l.total_supply() == 50);

        // Spend the new output onward.
        CHECK(l.redeem(spend(b, OutPoint{r.txid, 0}, c.address, 50)).accepted());
        CHECK(l.balance(c.address) == 50);
    }

    TEST_CASE("compressed keys redeem compressed addresses")
    {
        Ledger l;
        Wallet a = wallet(ec::U256{21});
        Address compressed = p2pkh_address(a.pub, true);
        TxId id = l.fund(compressed, 8);
        RedeemTx tx{OutPoint{id, 0}, a.address, 8, a.pub.serialize(true), {}};
        sign_redeem(tx, a.key);
        RedeemTx wrong_form = spend(a, OutPoint{id, 0}, a.address, 8);
        CHECK(l.redeem(wrong_form).rejection == Rejection::PubkeyHashMismatch);
        CHECK(l.redeem(tx).accepted());
    }

    TEST_CASE("rejection names")
    {
        CHECK(to_string(Rejection::UnknownInput) == "unknown-input");
        CHECK(to_string(Rejection::DoubleSpend) == "double-spend");
        CHECK(to_string(Rejection::PubkeyHashMismatch) == "pubkey-hash-mismatch");
        CHECK(to_string(Rejection::BadSignature) == "bad-signature");
        CHECK(to_string(Rejection::AmountMismatch) == "amount-mismatch");
    }

    TEST_CASE("other keys cannot redeem")
    {
        std::mt19937_64 rng(1);
        Ledger l;
        Wallet owner = random_wallet(rng), dest = random_wallet(rng);
        OutPoint op{l.fund(owner.address, 50), 0};
        for (int t = 0; t < 10; ++t) {
            Wallet other = random_wallet(rng);
            CHECK_FALSE(l.redeem(spend(other, op, dest.address, 50)).accepted());
            // Right public key, wrong signer.
            RedeemTx tx = spend(owner, op, dest.address, 50);
            sign_redeem(tx, other.key);
            CHECK(l.redeem(tx).rejection == Rejection::BadSignature);
        }
        CHECK(l.redeem(spend(owner, op, dest.address, 50)).accepted());
    }

    TEST_CASE("random operation sequences never double spend and conserve value")
    {
        std::mt19937_64 rng(2);
        std::vector<Wallet> wallets;
        for (int i = 0; i < 6; ++i) wallets.push_back(random_wallet(rng));
        auto owner_of = [&](const Address& a) -> const Wallet& {
            for (const auto& w : wallets)
                if (w.address == a) return w;
            throw std::logic_error("unknown address");
        };

        Ledger l;
        std::set<OutPoint> consumed;
        std::vector<RedeemTx> accepted;
        std::uint64_t minted = 0;
        for (int op = 0; op < 1000; ++op) {
            const auto kind = rng() % 10;
            if (kind < 2 || l.utxos().empty()) {
                const auto amount = std::int64_t(1 + rng() % 100);
                l.fund(wallets[rng() % wallets.size()].address, amount);
                minted += std::uint64_t(amount);
            } else if (kind < 8) {
                auto it = l.utxos().begin();
                std::advance(it, std::ptrdiff_t(rng() % l.utxos().size()));
                const Utxo u = it->second;
                const Wallet& signer = rng() % 5 == 0 ? wallets[rng() % wallets.size()] : owner_of(u.address);
                const Address& to = wallets[rng() % wallets.size()].address;
                const std::uint64_t before = l.total_supply();
                RedeemTx tx = spend(signer, u.outpoint, to, u.amount);
                RedeemResult r = l.redeem(tx);
                if (r.accepted()) {
                    CHECK(signer.address == u.address);
                    CHECK(consumed.insert(u.outpoint).second);
                    accepted.push_back(tx);
                } else {
                    CHECK(signer.address != u.address);
                }
                CHECK(l.total_supply() == before);
            } else if (!accepted.empty()) {
                CHECK(l.redeem(accepted[rng() % accepted.size()]).rejection == Rejection::DoubleSpend);
            }
            CHECK(l.total_supply() == minted);
        }
        std::uint64_t sum = 0;
        for (const auto& w : wallets) {
            CHECK(l.balance(w.address) == scan_balance(l, w.address));
            sum += l.balance(w.address);
        }
        CHECK(sum == minted);
        for (const auto& op : consumed) CHECK_FALSE(l.find(op).has_value());

        // The persisted form round trips byte for byte, spent set included.
        std::string text = l.to_json();
        Ledger back = Ledger::from_json(text);
        CHECK(back.to_json() == text);
        for (const auto& tx : accepted) CHECK(back.redeem(tx).rejection == Rejection::DoubleSpend);
    }

    TEST_CASE("malformed ledger files")
    {
        CHECK_THROWS_AS(Ledger::from_json("{"), FormatError);
        CHECK_THROWS_AS(Ledger::from_json(R"({"utxos": []})"), FormatError);
        CHECK_THROWS_AS(Ledger::from_json(R"({"utxos": [{"txid": "zz", "vout": 0, "amount": 1, "address": "x"}], "history": []})"),
                        FormatError);
    }
}
