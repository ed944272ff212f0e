#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "embedkey/address.hpp"
#include "embedkey/keyforge.hpp"

// In-memory P2PKH ledger. Zero fees, one input and one output per redeem,
// totally ordered history, no blocks. Mutating calls must be serialized by
// the caller; concurrent reads of a quiescent ledger are safe.

namespace embedkey::chainsim {

using TxId = crypto::Digest32;

struct OutPoint {
    TxId txid{};
    std::uint32_t vout = 0;

    friend auto operator<=>(const OutPoint&, const OutPoint&) = default;
};

struct Utxo {
    OutPoint outpoint;
    std::uint64_t amount = 0;
    Address address;
};

struct RedeemTx {
    OutPoint input;
    Address destination;
    std::uint64_t amount = 0;
    Bytes pubkey;        // SEC1, compressed or uncompressed
    Signature signature; // over sighash(tx)
};

enum class Rejection { UnknownInput, DoubleSpend, PubkeyHashMismatch, BadSignature, AmountMismatch };

/// "unknown-input", "double-spend", "pubkey-hash-mismatch", "bad-signature", "amount-mismatch".
std::string_view to_string(Rejection r);

struct RedeemResult {
    std::optional<Rejection> rejection;
    TxId txid{}; // set when accepted

    bool accepted() const { return !rejection.has_value(); }
};

struct FundRecord {
    TxId txid;
    Address address;
    std::uint64_t amount;
};

struct RedeemRecord {
    TxId txid;
    RedeemTx tx;
};

using HistoryEntry = std::variant<FundRecord, RedeemRecord>;

/// ascii(txid-hex ':' vout '|' destination '|' amount '|' pubkey-hex)
std::string sighash_preimage(const RedeemTx& tx);
/// SHA256D(sighash_preimage(tx)); the signature field is ignored.
crypto::Digest32 sighash(const RedeemTx& tx);

/// SHA256D(ascii(address '|' amount '|' history_length)).
TxId fund_txid(const Address& address, std::uint64_t amount, std::size_t history_length);
/// SHA256D(ascii(sighash_preimage '|' signature-hex)).
TxId redeem_txid(const RedeemTx& tx);

/// Fills in tx.signature = sign(priv, sighash(tx)).
void sign_redeem(RedeemTx& tx, const PrivateKey& priv);

class Ledger {
public:
    Ledger() = default;

    /// Coinbase-style output paying `amount` to `address`.
    /// Throws std::invalid_argument when amount <= 0.
    TxId fund(const Address& address, std::int64_t amount);

    /// Total: every failure is a rejection, never an exception.
    RedeemResult redeem(const RedeemTx& tx);

    std::uint64_t balance(const Address& address) const;
    std::uint64_t total_supply() const;

    const std::map<OutPoint, Utxo>& utxos() const { return utxos_; }
    const std::vector<HistoryEntry>& history() const { return history_; }
    std::optional<Utxo> find(const OutPoint& op) const;
    bool spent(const OutPoint& op) const { return spent_.contains(op); }

    /// {"utxos": [...], "history": [...]}; hashes in lowercase hex.
    std::string to_json() const;
    /// Throws FormatError naming the offending field.
    static Ledger from_json(const std::string& text);

private:
    std::map<OutPoint, Utxo> utxos_;
    std::set<OutPoint> spent_;
    std::vector<HistoryEntry> history_;
};

} // namespace embedkey::chainsim
