#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embedkey/embedding.hpp"

// Siamese embedding network trained with a double-margin contrastive loss
// plus a triangular saturation prior on the output pre-activations.
//
// Network: input -> dense+ReLU (hidden_dims...) -> dense -> sigmoid. All math
// in double precision; every random draw comes from a seeded Rng.

namespace embedkey::metricnet {

inline constexpr std::size_t kDefaultEmbedDim = 256;

/// Dense layer; weights are row-major, `outputs` rows of `inputs` columns.
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    std::span<const double> row(std::size_t i) const { return {weights.data() + i * inputs, inputs}; }
    std::span<double> row(std::size_t i) { return {weights.data() + i * inputs, inputs}; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

class Model {
public:
    /// Throws std::invalid_argument unless the layers chain
    /// input_dim -> hidden_dims... -> embed_dim with matching buffer sizes.
    Model(std::uint64_t seed, std::size_t input_dim, std::vector<std::size_t> hidden_dims, std::size_t embed_dim,
          std::vector<DenseLayer> layers);

    std::uint64_t seed() const { return seed_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t embed_dim() const { return embed_dim_; }
    const std::vector<std::size_t>& hidden_dims() const { return hidden_dims_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    /// Parameter update hook for the trainer; shapes cannot change.
    std::vector<DenseLayer>& mutable_layers() { return layers_; }

    friend bool operator==(const Model&, const Model&) = default;

private:
    std::uint64_t seed_;
    std::size_t input_dim_;
    std::vector<std::size_t> hidden_dims_;
    std::size_t embed_dim_;
    std::vector<DenseLayer> layers_;
};

/// Uniform weights in [-s, s], s = sqrt(6 / (fan_in + fan_out)); zero biases.
Model init_model(std::uint64_t seed, std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                 std::size_t embed_dim = kDefaultEmbedDim);

struct ForwardResult {
    std::vector<double> preact; // last layer, before the sigmoid
    Embedding embedding;
};

/// Logistic function, clamped into the open interval (0, 1).
double sigmoid(double x);

ForwardResult forward(const Model& model, std::span<const double> input);

/// y * max(d2 - m1, 0) + (1 - y) * max(m2 - d2, 0), d2 = ||z_a - z_b||^2.
double contrastive_loss(std::span<const double> z_a, std::span<const double> z_b, int y, double m1, double m2);
double contrastive_loss(const Embedding& z_a, const Embedding& z_b, int y, double m1, double m2);

/// sum_i lambda * (1 - |2 sigmoid(x_i) - 1|).
double triangular_reg(std::span<const double> preact, double lambda);

struct Pair {
    std::vector<double> a;
    std::vector<double> b;
    int label = 0; // 1 genuine (same class), 0 impostor
};

struct PairBatch {
    std::vector<Pair> pairs;
};

struct HyperParams {
    double m1 = 0.25;           // genuine margin
    double m2 = 1.5;            // impostor margin
    double lambda = 0.1;        // saturation prior weight
    double learning_rate = 0.05;
    std::uint32_t epochs = 200;
    std::uint64_t seed = 0;
    std::size_t pairs_per_epoch = 256;
    std::size_t batch_size = 32;
    double genuine_fraction = 0.5;

    /// Throws std::invalid_argument unless 0 <= m1 < m2, lambda >= 0,
    /// learning_rate > 0, batch_size and pairs_per_epoch >= 1 and
    /// genuine_fraction in [0, 1].
    void validate() const;
};

/// Mean over pairs of contrastive_loss + triangular_reg(a) + triangular_reg(b).
double batch_objective(const Model& model, const PairBatch& batch, const HyperParams& hp);

/// Same layout as Model::layers(); weights/bias hold d objective / d param.
using Gradients = std::vector<DenseLayer>;

/// Exact gradient of batch_objective. Subgradient 0 at every kink (ReLU at 0,
/// hinge at the margin, |.| at a zero pre-activation).
Gradients gradients(const Model& model, const PairBatch& batch, const HyperParams& hp);

struct Sample {
    std::vector<double> x;
    int class_id = 0;
};

struct SyntheticDataset {
    std::vector<Sample> samples;
    std::size_t classes = 0;
    std::size_t dim = 0;

    /// Throws std::invalid_argument when a class id is out of range, a class
    /// has fewer than two samples or a sample has the wrong length.
    void validate() const;
};

/// Class centers uniform in [-1, 1]^dim, samples center + N(0, sigma^2) per
/// coordinate, grouped by class in order.
SyntheticDataset gen_synthetic_dataset(std::uint64_t seed, std::size_t classes, std::size_t per_class,
                                       std::size_t dim, double noise_sigma);

/// Moves the last `holdout_per_class` samples of every class into a second
/// dataset. Returns (train, held_out).
std::pair<SyntheticDataset, SyntheticDataset> split_holdout(const SyntheticDataset& data,
                                                            std::size_t holdout_per_class);

/// round(n_pairs * genuine_fraction) genuine pairs, the rest impostors, in
/// shuffled order.
PairBatch sample_pairs(const SyntheticDataset& data, std::uint64_t seed, std::size_t n_pairs,
                       double genuine_fraction);

struct TrainResult {
    Model model;
    std::vector<double> history;  // objective on the evaluation batch after each epoch
    double initial_objective = 0; // same batch, before the first update
};

/// Plain mini-batch gradient descent. Each epoch draws hp.pairs_per_epoch
/// fresh pairs and steps once per hp.batch_size chunk. The evaluation batch
/// is drawn once from the same data.
TrainResult train(const Model& model, const SyntheticDataset& data, const HyperParams& hp);

// {input_dim, hidden_dims, embed_dim, seed, layers: [{weights, bias}]}
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
Model read_model(const std::filesystem::path& path);
void write_model(const Model& model, const std::filesystem::path& path);

} // namespace embedkey::metricnet
