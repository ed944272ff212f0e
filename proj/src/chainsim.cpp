#include "embedkey/chainsim.hpp"

#include <stdexcept>

#include "embedkey/error.hpp"
#include "textio.hpp"

namespace embedkey::chainsim {

using nlohmann::json;

std::string_view to_string(Rejection r)
{
    switch (r) {
    case Rejection::UnknownInput: return "unknown-input";
    case Rejection::DoubleSpend: return "double-spend";
    case Rejection::PubkeyHashMismatch: return "pubkey-hash-mismatch";
    case Rejection::BadSignature: return "bad-signature";
    case Rejection::AmountMismatch: return "amount-mismatch";
    }
    return "unknown";
}

std::string sighash_preimage(const RedeemTx& tx)
{
    return to_hex(tx.input.txid) + ':' + std::to_string(tx.input.vout) + '|' + tx.destination.text() + '|' +
           std::to_string(tx.amount) + '|' + to_hex(tx.pubkey);
}

crypto::Digest32 sighash(const RedeemTx& tx)
{
    return sha256d(to_bytes(sighash_preimage(tx)));
}

TxId fund_txid(const Address& address, std::uint64_t amount, std::size_t history_length)
{
    std::string preimage = address.text() + '|' + std::to_string(amount) + '|' + std::to_string(history_length);
    return sha256d(to_bytes(preimage));
}

TxId redeem_txid(const RedeemTx& tx)
{
    std::string preimage = sighash_preimage(tx) + '|' + to_hex(tx.signature.compact());
    return sha256d(to_bytes(preimage));
}

void sign_redeem(RedeemTx& tx, const PrivateKey& priv)
{
    crypto::Digest32 h = sighash(tx);
    tx.signature = sign(priv, h);
}

TxId Ledger::fund(const Address& address, std::int64_t amount)
{
    if (amount <= 0) throw std::invalid_argument("fund: amount must be positive");
    const auto value = std::uint64_t(amount);
    TxId id = fund_txid(address, value, history_.size());
    OutPoint op{id, 0};
    // A repeated (address, amount, length) triple cannot occur: length grows.
    utxos_.emplace(op, Utxo{op, value, address});
    history_.emplace_back(FundRecord{id, address, value});
    return id;
}

RedeemResult Ledger::redeem(const RedeemTx& tx)
{
    auto reject = [](Rejection r) { return RedeemResult{r, {}}; };

    if (spent_.contains(tx.input)) return reject(Rejection::DoubleSpend);
    auto it = utxos_.find(tx.input);
    if (it == utxos_.end()) return reject(Rejection::UnknownInput);
    const Utxo& utxo = it->second;

    if (hash160(tx.pubkey) != utxo.address.payload()) return reject(Rejection::PubkeyHashMismatch);

    std::optional<PublicKey> pub;
    try {
        pub = PublicKey::parse(tx.pubkey);
    } catch (const std::exception&) {
        return reject(Rejection::BadSignature);
    }
    if (!verify(*pub, sighash(tx), tx.signature)) return reject(Rejection::BadSignature);

    if (tx.amount != utxo.amount) return reject(Rejection::AmountMismatch);

    TxId id = redeem_txid(tx);
    OutPoint created{id, 0};
    spent_.insert(tx.input);
    utxos_.erase(it);
    utxos_.emplace(created, Utxo{created, tx.amount, tx.destination});
    history_.emplace_back(RedeemRecord{id, tx});
    return RedeemResult{std::nullopt, id};
}

std::uint64_t Ledger::balance(const Address& address) const
{
    std::uint64_t sum = 0;
    for (const auto& [op, u] : utxos_)
        if (u.address == address) sum += u.amount;
    return sum;
}

std::uint64_t Ledger::total_supply() const
{
    std::uint64_t sum = 0;
    for (const auto& [op, u] : utxos_) sum += u.amount;
    return sum;
}

std::optional<Utxo> Ledger::find(const OutPoint& op) const
{
    auto it = utxos_.find(op);
    if (it == utxos_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------- persistence

namespace {

TxId parse_txid(const json& v, const std::string& field)
{
    Bytes b = from_hex(detail::require_string(v, field), field);
    if (b.size() != 32) throw FormatError(field, "field '" + field + "' must be 32 bytes of hex");
    TxId id;
    std::copy(b.begin(), b.end(), id.begin());
    return id;
}

Address parse_address(const json& v, const std::string& field)
{
    try {
        return Address::parse(detail::require_string(v, field));
    } catch (const ChecksumError& e) {
        throw FormatError(field, "field '" + field + "': " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(field, "field '" + field + "': " + e.what());
    }
}

std::uint32_t parse_vout(const json& v, const std::string& field)
{
    std::uint64_t x = detail::require_unsigned(v, field);
    if (x > 0xffffffffu) throw FormatError(field, "field '" + field + "' out of range");
    return std::uint32_t(x);
}

} // namespace

std::string Ledger::to_json() const
{
    json utxos = json::array();
    for (const auto& [op, u] : utxos_)
        utxos.push_back({{"txid", to_hex(op.txid)}, {"vout", op.vout}, {"amount", u.amount},
                         {"address", u.address.text()}});

    json history = json::array();
    for (const auto& entry : history_) {
        if (const auto* f = std::get_if<FundRecord>(&entry)) {
            history.push_back({{"type", "fund"}, {"txid", to_hex(f->txid)}, {"address", f->address.text()},
                               {"amount", f->amount}});
        } else {
            const auto& r = std::get<RedeemRecord>(entry);
            history.push_back({{"type", "redeem"},
                               {"txid", to_hex(r.txid)},
                               {"input", {{"txid", to_hex(r.tx.input.txid)}, {"vout", r.tx.input.vout}}},
                               {"destination", r.tx.destination.text()},
                               {"amount", r.tx.amount},
                               {"pubkey", to_hex(r.tx.pubkey)},
                               {"signature", to_hex(r.tx.signature.compact())}});
        }
    }
    return json{{"utxos", utxos}, {"history", history}}.dump(2) + "\n";
}

Ledger Ledger::from_json(const std::string& text)
{
    json doc = detail::parse_json(text, "ledger");
    Ledger ledger;

    const json& utxos = detail::require(doc, "utxos");
    if (!utxos.is_array()) throw FormatError("utxos", "field 'utxos' must be an array");
    for (std::size_t i = 0; i < utxos.size(); ++i) {
        const std::string at = "utxos[" + std::to_string(i) + "].";
        const json& u = utxos[i];
        OutPoint op{parse_txid(detail::require(u, "txid"), at + "txid"), parse_vout(detail::require(u, "vout"), at + "vout")};
        Utxo utxo{op, detail::require_unsigned(detail::require(u, "amount"), at + "amount"),
                  parse_address(detail::require(u, "address"), at + "address")};
        if (!ledger.utxos_.emplace(op, utxo).second) throw FormatError(at + "txid", "duplicate outpoint in utxos");
    }

    const json& history = detail::require(doc, "history");
    if (!history.is_array()) throw FormatError("history", "field 'history' must be an array");
    for (std::size_t i = 0; i < history.size(); ++i) {
        const std::string at = "history[" + std::to_string(i) + "].";
        const json& h = history[i];
        const std::string& type = detail::require_string(detail::require(h, "type"), at + "type");
        TxId id = parse_txid(detail::require(h, "txid"), at + "txid");
        std::uint64_t amount = detail::require_unsigned(detail::require(h, "amount"), at + "amount");
        if (type == "fund") {
            ledger.history_.emplace_back(FundRecord{id, parse_address(detail::require(h, "address"), at + "address"), amount});
        } else if (type == "redeem") {
            const json& in = detail::require(h, "input");
            RedeemTx tx{OutPoint{parse_txid(detail::require(in, "txid"), at + "input.txid"),
                                 parse_vout(detail::require(in, "vout"), at + "input.vout")},
                        parse_address(detail::require(h, "destination"), at + "destination"),
                        amount,
                        from_hex(detail::require_string(detail::require(h, "pubkey"), at + "pubkey"), at + "pubkey"),
                        {}};
            Bytes sig = from_hex(detail::require_string(detail::require(h, "signature"), at + "signature"),
                                 at + "signature");
            if (sig.size() != 64) throw FormatError(at + "signature", "signature must be 64 bytes of hex");
            tx.signature = Signature::from_compact(sig);
            ledger.spent_.insert(tx.input);
            ledger.history_.emplace_back(RedeemRecord{id, std::move(tx)});
        } else {
            throw FormatError(at + "type", "history type must be 'fund' or 'redeem'");
        }
    }
    return ledger;
}

} // namespace embedkey::chainsim
