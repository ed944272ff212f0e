#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace embedkey {

/// Post-sigmoid activation vector; every element lies strictly in (0, 1).
class Embedding {
public:
    /// Throws std::invalid_argument if empty or any element is outside (0, 1).
    explicit Embedding(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::size_t dim() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const Embedding&, const Embedding&) = default;

private:
    std::vector<double> values_;
};

/// Fixed-length bit code. Bits are packed big-endian: bit 0 is the most
/// significant bit of byte 0. Padding bits past dim() are always zero.
class BinaryCode {
public:
    /// All-zero code of the given length (dim >= 1).
    explicit BinaryCode(std::size_t dim);

    /// Throws std::invalid_argument when bytes.size() != ceil(dim / 8) or a
    /// padding bit is set.
    static BinaryCode from_bytes(std::size_t dim, std::span<const std::uint8_t> bytes);
    /// ceil(dim / 4) hex digits in packing order. Throws FormatError("hex").
    static BinaryCode from_hex(std::size_t dim, const std::string& hex);

    std::size_t dim() const { return dim_; }
    bool bit(std::size_t i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1u; }
    void set(std::size_t i, bool value);
    std::span<const std::uint8_t> bytes() const { return bytes_; }
    std::string hex() const;

    friend bool operator==(const BinaryCode&, const BinaryCode&) = default;

private:
    std::size_t dim_;
    std::vector<std::uint8_t> bytes_;
};

/// Threshold of the decision boundary between the two code values.
inline constexpr double kBinarizeThreshold = 0.5;

/// bit_i = 1 iff values_i >= 0.5.
BinaryCode binarize(const Embedding& e);

/// Squared Euclidean distance. Throws std::invalid_argument on dim mismatch.
double euclidean_dist2(const Embedding& a, const Embedding& b);

/// Number of differing bits. Throws std::invalid_argument on dim mismatch.
std::size_t hamming(const BinaryCode& a, const BinaryCode& b);

/// Indices of the k nearest items to corpus[query], excluding the query,
/// nearest first, ties broken by ascending index. Squared L2 for
/// embeddings, Hamming for codes. Throws std::invalid_argument unless
/// 1 <= k < corpus.size() and query < corpus.size().
std::vector<std::size_t> topk_neighbors(std::size_t query, std::span<const Embedding> corpus, std::size_t k);
std::vector<std::size_t> topk_neighbors(std::size_t query, std::span<const BinaryCode> corpus, std::size_t k);

/// |a ∩ b| / k for two rankings of equal length k.
double neighbor_overlap(std::span<const std::size_t> real_ranking, std::span<const std::size_t> binary_ranking);

// File format: {"dim": N, "values": [v0, v1, ...]} with 17 significant digits.
std::string embedding_to_json(const Embedding& e);
/// Throws FormatError naming the offending field.
Embedding embedding_from_json(const std::string& text);
Embedding read_embedding(const std::filesystem::path& path);
void write_embedding(const Embedding& e, const std::filesystem::path& path);

// File format: {"dim": N, "hex": "<ceil(N/4) hex digits>"}.
std::string code_to_json(const BinaryCode& c);
BinaryCode code_from_json(const std::string& text);

} // namespace embedkey
