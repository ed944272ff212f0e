#include "embedkey/cli.hpp"

#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "embedkey/address.hpp"
#include "embedkey/chainsim.hpp"
#include "embedkey/embedding.hpp"
#include "embedkey/error.hpp"
#include "embedkey/keyforge.hpp"
#include "embedkey/metricnet.hpp"
#include "textio.hpp"

namespace embedkey::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void emit(std::ostream& out, const json& doc)
{
    out << doc.dump(2) << '\n';
}

std::uint8_t parse_version_byte(const std::string& text)
{
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(text, &used, 0);
    } catch (const std::exception&) {
        throw UsageError("--version must be a byte such as 0x00");
    }
    if (used != text.size() || v > 0xff) throw UsageError("--version must be a byte such as 0x00");
    return std::uint8_t(v);
}

std::string read_passphrase_from_terminal()
{
    if (!isatty(STDIN_FILENO)) throw UsageError("--ask-passphrase needs an interactive terminal; use --passphrase");
    termios saved{};
    tcgetattr(STDIN_FILENO, &saved);
    termios silent = saved;
    silent.c_lflag &= tcflag_t(~ECHO);
    tcsetattr(STDIN_FILENO, TCSANOW, &silent);
    std::fputs("passphrase: ", stderr);
    std::string line;
    std::getline(std::cin, line);
    tcsetattr(STDIN_FILENO, TCSANOW, &saved);
    std::fputs("\n", stderr);
    return line;
}

// Key-derivation flags shared by `derive` and `redeem`.
struct KeyFlags {
    std::string embedding;
    std::string passphrase;
    bool ask_passphrase = false;
    std::string salt{kDefaultSalt};
    std::uint32_t iterations = kDefaultPbkdf2Iterations;
    bool compressed = false;

    void add_to(CLI::App* app, CLI::Option*& passphrase_opt)
    {
        app->add_option("--embedding", embedding, "Embedding file ({\"dim\", \"values\"})")->required();
        passphrase_opt = app->add_option("--passphrase", passphrase, "Optional passphrase mixed in through PBKDF2");
        app->add_flag("--ask-passphrase", ask_passphrase, "Prompt for the passphrase (interactive terminals only)")
            ->excludes(passphrase_opt);
        app->add_option("--salt", salt, "PBKDF2 salt")->capture_default_str();
        app->add_option("--iterations", iterations, "PBKDF2 iterations")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        app->add_flag("--compressed", compressed, "Use the 33-byte compressed public key");
    }

    PrivateKey derive(const CLI::Option* passphrase_opt) const
    {
        std::optional<Bytes> password;
        if (passphrase_opt->count() > 0) password = to_bytes(passphrase);
        if (ask_passphrase) password = to_bytes(read_passphrase_from_terminal());
        BinaryCode code = binarize(read_embedding(embedding));
        return derive_private_key(code, password, to_bytes(salt), iterations);
    }
};

chainsim::Ledger load_ledger_or_new(const std::string& path)
{
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return chainsim::Ledger{};
    return chainsim::Ledger::from_json(detail::read_text_file(path));
}

chainsim::TxId parse_txid(const std::string& text)
{
    Bytes b = from_hex(text, "txid");
    if (b.size() != 32) throw FormatError("txid", "txid must be 64 hex digits");
    chainsim::TxId id;
    std::copy(b.begin(), b.end(), id.begin());
    return id;
}

std::vector<double> read_input_vector(const std::string& path)
{
    json doc = detail::parse_json(detail::read_text_file(path), "input vector");
    const json* values = &doc;
    if (doc.is_object()) {
        values = &detail::require(doc, "values");
        if (doc.contains("dim") && detail::require_unsigned(doc["dim"], "dim") != values->size())
            throw FormatError("values", "field 'values' length does not match 'dim'");
    }
    if (!values->is_array() || values->empty()) throw FormatError("values", "input vector must be a non-empty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < values->size(); ++i)
        out.push_back(detail::require_number((*values)[i], "values[" + std::to_string(i) + "]"));
    return out;
}

std::string vector_to_json(std::span<const double> v)
{
    std::string out = "{\"dim\": " + std::to_string(v.size()) + ", \"values\": [";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += detail::format_double(v[i]);
    }
    return out + "]}\n";
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"embedkey: secp256k1 keys and P2PKH addresses from binarized embeddings.\n"
                 "Demo grade: key arithmetic is not constant time."};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train an embedding network on a synthetic dataset");
    std::size_t classes = 10, per_class = 20, dim = 64, embed_dim = metricnet::kDefaultEmbedDim;
    double noise = 0.15;
    std::uint64_t seed = 1;
    std::vector<std::size_t> hidden{128};
    std::string model_out;
    metricnet::HyperParams hp;
    train_cmd->add_option("--classes", classes, "Number of synthetic classes")->capture_default_str();
    train_cmd->add_option("--per-class", per_class, "Samples per class (>= 2)")->capture_default_str();
    train_cmd->add_option("--dim", dim, "Input dimension")->capture_default_str();
    train_cmd->add_option("--noise", noise, "Within-class Gaussian sigma")->capture_default_str();
    train_cmd->add_option("--hidden", hidden, "Hidden layer widths")->capture_default_str();
    train_cmd->add_option("--embed-dim", embed_dim, "Embedding width")->capture_default_str();
    train_cmd->add_option("--epochs", hp.epochs, "Training epochs")->capture_default_str();
    train_cmd->add_option("--seed", seed, "Seed for data, init and pair sampling")
        ->capture_default_str()
        ->envname("EMBEDKEY_SEED");
    train_cmd->add_option("--m1", hp.m1, "Genuine-pair margin")->capture_default_str();
    train_cmd->add_option("--m2", hp.m2, "Impostor-pair margin")->capture_default_str();
    train_cmd->add_option("--lambda", hp.lambda, "Saturation prior weight")->capture_default_str();
    train_cmd->add_option("--lr", hp.learning_rate, "Learning rate")->capture_default_str();
    train_cmd->add_option("--batch-size", hp.batch_size, "Pairs per gradient step")->capture_default_str();
    train_cmd->add_option("--pairs-per-epoch", hp.pairs_per_epoch, "Pairs drawn per epoch")->capture_default_str();
    train_cmd->add_option("--out", model_out, "Model file to write")->required();

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Write one synthetic input vector");
    std::size_t sample_class = 0, sample_index = 0;
    std::string sample_out;
    sample_cmd->add_option("--classes", classes, "Number of synthetic classes")->capture_default_str();
    sample_cmd->add_option("--per-class", per_class, "Samples per class")->capture_default_str();
    sample_cmd->add_option("--dim", dim, "Input dimension")->capture_default_str();
    sample_cmd->add_option("--noise", noise, "Within-class Gaussian sigma")->capture_default_str();
    sample_cmd->add_option("--seed", seed, "Dataset seed")->capture_default_str()->envname("EMBEDKEY_SEED");
    sample_cmd->add_option("--class", sample_class, "Class id")->capture_default_str();
    sample_cmd->add_option("--index", sample_index, "Sample index within the class")->capture_default_str();
    sample_cmd->add_option("--out", sample_out, "Vector file to write (stdout when omitted)");

    // embed
    auto* embed_cmd = app.add_subcommand("embed", "Forward an input vector through a model");
    std::string model_path, input_path, embed_out;
    embed_cmd->add_option("--model", model_path, "Model file")->required();
    embed_cmd->add_option("--input", input_path, "Input vector file ({\"dim\", \"values\"} or an array)")->required();
    embed_cmd->add_option("--out", embed_out, "Embedding file to write (stdout when omitted)");

    // binarize
    auto* binarize_cmd = app.add_subcommand("binarize", "Print the binary code of an embedding");
    std::string embedding_path;
    binarize_cmd->add_option("--embedding", embedding_path, "Embedding file")->required();

    // derive
    auto* derive_cmd = app.add_subcommand("derive", "Derive a key pair and address from an embedding");
    KeyFlags derive_flags;
    CLI::Option* derive_pass = nullptr;
    std::string version_text = "0x00";
    bool want_wif = false;
    derive_flags.add_to(derive_cmd, derive_pass);
    derive_cmd->add_option("--version", version_text, "Address version byte")->capture_default_str();
    derive_cmd->add_flag("--wif", want_wif, "Also print the WIF private key");

    // address
    auto* address_cmd = app.add_subcommand("address", "P2PKH address of a public key");
    std::string pubkey_hex;
    bool address_compressed = false;
    address_cmd->add_option("--pubkey", pubkey_hex, "SEC1 public key, hex")->required();
    address_cmd->add_flag("--compressed", address_compressed, "Hash the compressed serialization");
    address_cmd->add_option("--version", version_text, "Address version byte")->capture_default_str();

    // fund
    auto* fund_cmd = app.add_subcommand("fund", "Pay an amount to an address on the local ledger");
    std::string ledger_path, address_text;
    std::int64_t amount = 0;
    fund_cmd->add_option("--ledger", ledger_path, "Ledger file (created when missing)")->required();
    fund_cmd->add_option("--address", address_text, "Destination address")->required();
    fund_cmd->add_option("--amount", amount, "Positive amount")->required();

    // redeem
    auto* redeem_cmd = app.add_subcommand("redeem", "Spend an output with a key derived from an embedding");
    KeyFlags redeem_flags;
    CLI::Option* redeem_pass = nullptr;
    std::string txid_text, dest_text;
    std::uint32_t vout = 0;
    redeem_cmd->add_option("--ledger", ledger_path, "Ledger file")->required();
    redeem_cmd->add_option("--txid", txid_text, "Output txid, hex")->required();
    redeem_cmd->add_option("--vout", vout, "Output index")->capture_default_str();
    redeem_cmd->add_option("--dest", dest_text, "Destination address")->required();
    redeem_flags.add_to(redeem_cmd, redeem_pass);

    // balance
    auto* balance_cmd = app.add_subcommand("balance", "Unspent amount held by an address");
    balance_cmd->add_option("--ledger", ledger_path, "Ledger file")->required();
    balance_cmd->add_option("--address", address_text, "Address")->required();

    // distance
    auto* distance_cmd = app.add_subcommand("distance", "Squared L2 or Hamming distance of two embeddings");
    std::string path_a, path_b;
    bool binary = false;
    distance_cmd->add_option("--a", path_a, "First embedding file")->required();
    distance_cmd->add_option("--b", path_b, "Second embedding file")->required();
    distance_cmd->add_flag("--binary", binary, "Hamming distance of the binarized codes");

    // report
    auto* report_cmd = app.add_subcommand("report", "Per-class mean squared distances on synthetic data");
    std::optional<std::size_t> query;
    report_cmd->add_option("--model", model_path, "Model file")->required();
    report_cmd->add_option("--classes", classes, "Number of synthetic classes")->capture_default_str();
    report_cmd->add_option("--per-class", per_class, "Samples per class")->capture_default_str();
    report_cmd->add_option("--noise", noise, "Within-class Gaussian sigma")->capture_default_str();
    report_cmd->add_option("--seed", seed, "Dataset seed")->capture_default_str()->envname("EMBEDKEY_SEED");
    report_cmd->add_option("--query", query, "Also report one sample's mean distance to every class");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (app.got_subcommand(train_cmd)) {
        hp.seed = seed;
        auto data = metricnet::gen_synthetic_dataset(seed, classes, per_class, dim, noise);
        auto model = metricnet::init_model(seed, dim, hidden, embed_dim);
        auto result = metricnet::train(model, data, hp);
        metricnet::write_model(result.model, model_out);
        emit(out, {{"model", model_out},
                   {"epochs", hp.epochs},
                   {"initial_objective", result.initial_objective},
                   {"final_objective", result.history.empty() ? result.initial_objective : result.history.back()}});
    } else if (app.got_subcommand(sample_cmd)) {
        auto data = metricnet::gen_synthetic_dataset(seed, classes, per_class, dim, noise);
        if (sample_class >= classes || sample_index >= per_class)
            throw std::invalid_argument("sample: --class/--index out of range");
        std::string text = vector_to_json(data.samples[sample_class * per_class + sample_index].x);
        if (sample_out.empty()) out << text;
        else {
            detail::write_text_file(sample_out, text);
            emit(out, {{"out", sample_out}, {"class", sample_class}, {"index", sample_index}});
        }
    } else if (app.got_subcommand(embed_cmd)) {
        auto model = metricnet::read_model(model_path);
        auto result = metricnet::forward(model, read_input_vector(input_path));
        if (embed_out.empty()) out << embedding_to_json(result.embedding);
        else {
            write_embedding(result.embedding, embed_out);
            emit(out, {{"out", embed_out}, {"dim", result.embedding.dim()}, {"code_hex", binarize(result.embedding).hex()}});
        }
    } else if (app.got_subcommand(binarize_cmd)) {
        out << code_to_json(binarize(read_embedding(embedding_path)));
    } else if (app.got_subcommand(derive_cmd)) {
        const std::uint8_t version = parse_version_byte(version_text);
        PrivateKey priv = derive_flags.derive(derive_pass);
        PublicKey pub = derive_public_key(priv);
        json doc{{"private_key_hex", priv.hex()},
                 {"public_key_hex", to_hex(pub.serialize(derive_flags.compressed))},
                 {"address", p2pkh_address(pub, derive_flags.compressed, version).text()}};
        if (want_wif) doc["wif"] = wif_encode(priv, derive_flags.compressed);
        emit(out, doc);
    } else if (app.got_subcommand(address_cmd)) {
        const std::uint8_t version = parse_version_byte(version_text);
        PublicKey pub = PublicKey::parse(from_hex(pubkey_hex, "pubkey"));
        emit(out, {{"address", p2pkh_address(pub, address_compressed, version).text()}});
    } else if (app.got_subcommand(fund_cmd)) {
        Address addr = Address::parse(address_text);
        chainsim::Ledger ledger = load_ledger_or_new(ledger_path);
        chainsim::TxId id = ledger.fund(addr, amount);
        detail::write_text_file(ledger_path, ledger.to_json());
        emit(out, {{"txid", to_hex(id)}, {"vout", 0}, {"balance", ledger.balance(addr)}});
    } else if (app.got_subcommand(redeem_cmd)) {
        chainsim::Ledger ledger = chainsim::Ledger::from_json(detail::read_text_file(ledger_path));
        chainsim::OutPoint input{parse_txid(txid_text), vout};
        Address dest = Address::parse(dest_text);
        PrivateKey priv = redeem_flags.derive(redeem_pass);
        auto utxo = ledger.find(input);
        chainsim::RedeemTx tx{input, dest, utxo ? utxo->amount : 0,
                              derive_public_key(priv).serialize(redeem_flags.compressed), {}};
        chainsim::sign_redeem(tx, priv);
        auto result = ledger.redeem(tx);
        if (!result.accepted()) {
            std::string reason(chainsim::to_string(*result.rejection));
            emit(out, {{"status", "rejected"}, {"reason", reason}});
            err << "error: redeem rejected: " << reason << '\n';
            return kExitDomainError;
        }
        detail::write_text_file(ledger_path, ledger.to_json());
        emit(out, {{"status", "accepted"}, {"txid", to_hex(result.txid)}, {"vout", 0}, {"amount", tx.amount}});
    } else if (app.got_subcommand(balance_cmd)) {
        Address addr = Address::parse(address_text);
        chainsim::Ledger ledger = chainsim::Ledger::from_json(detail::read_text_file(ledger_path));
        emit(out, {{"address", addr.text()}, {"balance", ledger.balance(addr)}});
    } else if (app.got_subcommand(distance_cmd)) {
        Embedding a = read_embedding(path_a);
        Embedding b = read_embedding(path_b);
        if (binary) emit(out, {{"metric", "hamming"}, {"distance", hamming(binarize(a), binarize(b))}});
        else emit(out, {{"metric", "squared_l2"}, {"distance", euclidean_dist2(a, b)}});
    } else if (app.got_subcommand(report_cmd)) {
        auto model = metricnet::read_model(model_path);
        auto data = metricnet::gen_synthetic_dataset(seed, classes, per_class, model.input_dim(), noise);
        std::vector<Embedding> embeddings;
        for (const auto& s : data.samples) embeddings.push_back(metricnet::forward(model, s.x).embedding);

        std::vector<std::vector<double>> sum(classes, std::vector<double>(classes, 0.0));
        std::vector<std::vector<std::size_t>> count(classes, std::vector<std::size_t>(classes, 0));
        for (std::size_t i = 0; i < embeddings.size(); ++i)
            for (std::size_t j = 0; j < embeddings.size(); ++j) {
                if (i == j) continue;
                auto ci = std::size_t(data.samples[i].class_id), cj = std::size_t(data.samples[j].class_id);
                sum[ci][cj] += euclidean_dist2(embeddings[i], embeddings[j]);
                ++count[ci][cj];
            }
        json matrix = json::array();
        for (std::size_t i = 0; i < classes; ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < classes; ++j) row.push_back(sum[i][j] / double(count[i][j]));
            matrix.push_back(row);
        }
        json doc{{"classes", classes}, {"per_class", per_class}, {"mean_squared_l2", matrix}};
        if (query) {
            if (*query >= embeddings.size()) throw std::invalid_argument("report: --query out of range");
            json row = json::array();
            for (std::size_t c = 0; c < classes; ++c) {
                double s = 0.0;
                std::size_t n = 0;
                for (std::size_t j = 0; j < embeddings.size(); ++j)
                    if (j != *query && std::size_t(data.samples[j].class_id) == c) {
                        s += euclidean_dist2(embeddings[*query], embeddings[j]);
                        ++n;
                    }
                row.push_back(s / double(n));
            }
            doc["query"] = {{"index", *query}, {"class", data.samples[*query].class_id}, {"mean_squared_l2", row}};
        }
        emit(out, doc);
    }
    return kExitOk;
}

} // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    try {
        return dispatch(argc, argv, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomainError;
    } catch (const FormatError& e) {
        err << "error: format error in '" << e.field() << "': " << e.what() << '\n';
        return kExitDomainError;
    } catch (const ChecksumError& e) {
        err << "error: checksum error: " << e.what() << '\n';
        return kExitDomainError;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid argument: " << e.what() << '\n';
        return kExitDomainError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("embedkey");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    argv.push_back(nullptr);
    return run(int(storage.size()), argv.data(), out, err);
}

} // namespace embedkey::cli
