#include "embedkey/embedding.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "embedkey/error.hpp"
#include "embedkey/hex.hpp"
#include "embedkey/kernels.hpp"
#include "textio.hpp"

namespace embedkey {

Embedding::Embedding(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) throw std::invalid_argument("embedding: dim must be >= 1");
    for (double v : values_)
        if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("embedding: values must lie in (0, 1)");
}

BinaryCode::BinaryCode(std::size_t dim) : dim_(dim), bytes_((dim + 7) / 8, 0)
{
    if (dim == 0) throw std::invalid_argument("binary code: dim must be >= 1");
}

BinaryCode BinaryCode::from_bytes(std::size_t dim, std::span<const std::uint8_t> bytes)
{
    BinaryCode c(dim);
    if (bytes.size() != c.bytes_.size())
        throw std::invalid_argument("binary code: byte length does not match dim");
    std::copy(bytes.begin(), bytes.end(), c.bytes_.begin());
    if (dim % 8 != 0) {
        std::uint8_t pad_mask = std::uint8_t(0xffu >> (dim % 8));
        if (c.bytes_.back() & pad_mask) throw std::invalid_argument("binary code: padding bits must be zero");
    }
    return c;
}

BinaryCode BinaryCode::from_hex(std::size_t dim, const std::string& hex)
{
    BinaryCode c(dim);
    const std::size_t digits = (dim + 3) / 4;
    if (hex.size() != digits) throw FormatError("hex", "hex: expected " + std::to_string(digits) + " digits");
    std::string padded = hex;
    if (padded.size() % 2 != 0) padded.push_back('0');
    Bytes bytes = embedkey::from_hex(padded, "hex");
    try {
        return from_bytes(dim, bytes);
    } catch (const std::invalid_argument&) {
        throw FormatError("hex", "hex: bits set beyond dim");
    }
}

void BinaryCode::set(std::size_t i, bool value)
{
    std::uint8_t mask = std::uint8_t(0x80u >> (i % 8));
    if (value) bytes_[i / 8] |= mask;
    else bytes_[i / 8] &= std::uint8_t(~mask);
}

std::string BinaryCode::hex() const
{
    std::string h = to_hex(bytes_);
    h.resize((dim_ + 3) / 4);
    return h;
}

BinaryCode binarize(const Embedding& e)
{
    BinaryCode code(e.dim());
    for (std::size_t i = 0; i < e.dim(); ++i) code.set(i, e[i] >= kBinarizeThreshold);
    return code;
}

double euclidean_dist2(const Embedding& a, const Embedding& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("euclidean_dist2: dim mismatch");
    return kernels::dist2(a.values(), b.values());
}

std::size_t hamming(const BinaryCode& a, const BinaryCode& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("hamming: dim mismatch");
    return std::size_t(kernels::hamming(a.bytes(), b.bytes()));
}

namespace {

template <typename Item, typename Distance>
std::vector<std::size_t> topk_by(std::size_t query, std::span<const Item> corpus, std::size_t k, Distance distance)
{
    if (query >= corpus.size()) throw std::invalid_argument("topk_neighbors: query index out of range");
    if (k == 0 || k >= corpus.size()) throw std::invalid_argument("topk_neighbors: need 1 <= k < corpus size");

    using Entry = std::pair<decltype(distance(corpus[0], corpus[0])), std::size_t>;
    std::vector<Entry> scored;
    scored.reserve(corpus.size() - 1);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        if (i != query) scored.emplace_back(distance(corpus[query], corpus[i]), i);
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());

    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
    return out;
}

} // namespace

std::vector<std::size_t> topk_neighbors(std::size_t query, std::span<const Embedding> corpus, std::size_t k)
{
    return topk_by(query, corpus, k, euclidean_dist2);
}

std::vector<std::size_t> topk_neighbors(std::size_t query, std::span<const BinaryCode> corpus, std::size_t k)
{
    return topk_by(query, corpus, k, [](const BinaryCode& a, const BinaryCode& b) { return hamming(a, b); });
}

double neighbor_overlap(std::span<const std::size_t> real_ranking, std::span<const std::size_t> binary_ranking)
{
    if (real_ranking.size() != binary_ranking.size())
        throw std::invalid_argument("neighbor_overlap: rankings differ in length");
    if (real_ranking.empty()) throw std::invalid_argument("neighbor_overlap: empty rankings");
    std::unordered_set<std::size_t> seen(real_ranking.begin(), real_ranking.end());
    std::size_t common = 0;
    for (std::size_t idx : binary_ranking) common += seen.erase(idx);
    return double(common) / double(real_ranking.size());
}

// ------------------------------------------------------------------ files

std::string embedding_to_json(const Embedding& e)
{
    std::string out = "{\"dim\": " + std::to_string(e.dim()) + ", \"values\": [";
    for (std::size_t i = 0; i < e.dim(); ++i) {
        if (i) out += ", ";
        out += detail::format_double(e[i]);
    }
    out += "]}\n";
    return out;
}

Embedding embedding_from_json(const std::string& text)
{
    auto doc = detail::parse_json(text, "embedding");
    std::uint64_t dim = detail::require_unsigned(detail::require(doc, "dim"), "dim");
    const auto& values = detail::require(doc, "values");
    if (!values.is_array()) throw FormatError("values", "field 'values' must be an array");
    if (dim == 0) throw FormatError("dim", "field 'dim' must be >= 1");
    if (values.size() != dim)
        throw FormatError("values", "field 'values' has " + std::to_string(values.size()) +
                                        " entries but dim is " + std::to_string(dim));
    std::vector<double> v;
    v.reserve(dim);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::string field = "values[" + std::to_string(i) + "]";
        double x = detail::require_number(values[i], field);
        if (!(x > 0.0 && x < 1.0)) throw FormatError(field, "field '" + field + "' must lie in (0, 1)");
        v.push_back(x);
    }
    return Embedding(std::move(v));
}

Embedding read_embedding(const std::filesystem::path& path)
{
    return embedding_from_json(detail::read_text_file(path));
}

void write_embedding(const Embedding& e, const std::filesystem::path& path)
{
    detail::write_text_file(path, embedding_to_json(e));
}

std::string code_to_json(const BinaryCode& c)
{
    nlohmann::json doc{{"dim", c.dim()}, {"hex", c.hex()}};
    return doc.dump() + "\n";
}

BinaryCode code_from_json(const std::string& text)
{
    auto doc = detail::parse_json(text, "binary code");
    std::uint64_t dim = detail::require_unsigned(detail::require(doc, "dim"), "dim");
    if (dim == 0) throw FormatError("dim", "field 'dim' must be >= 1");
    return BinaryCode::from_hex(dim, detail::require_string(detail::require(doc, "hex"), "hex"));
}

} // namespace embedkey
