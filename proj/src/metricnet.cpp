#include "embedkey/metricnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "embedkey/error.hpp"
#include "embedkey/kernels.hpp"
#include "embedkey/rng.hpp"
#include "textio.hpp"

namespace embedkey::metricnet {

namespace {

constexpr double kSigmoidLow = std::numeric_limits<double>::min();
const double kSigmoidHigh = std::nextafter(1.0, 0.0);

// Streams carved out of HyperParams::seed.
constexpr std::uint64_t kEvalStream = 0xe7a1;
constexpr std::uint64_t kEpochStream = 0x1000;

DenseLayer make_layer(std::size_t inputs, std::size_t outputs)
{
    return DenseLayer{inputs, outputs, std::vector<double>(inputs * outputs, 0.0), std::vector<double>(outputs, 0.0)};
}

// Per-layer activations kept for the backward pass.
struct Trace {
    std::vector<std::vector<double>> inputs; // inputs[l] feeds layer l
    std::vector<std::vector<double>> preacts;
};

Trace run_layers(const Model& model, std::span<const double> input)
{
    if (input.size() != model.input_dim())
        throw std::invalid_argument("forward: input has " + std::to_string(input.size()) + " values, model expects " +
                                    std::to_string(model.input_dim()));
    const auto& layers = model.layers();
    Trace t;
    t.inputs.reserve(layers.size());
    t.preacts.reserve(layers.size());
    t.inputs.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const DenseLayer& layer = layers[l];
        std::vector<double> pre(layer.outputs);
        for (std::size_t i = 0; i < layer.outputs; ++i)
            pre[i] = kernels::dot(layer.row(i), t.inputs[l]) + layer.bias[i];
        if (l + 1 < layers.size()) {
            std::vector<double> act(pre.size());
            std::transform(pre.begin(), pre.end(), act.begin(), [](double v) { return v > 0.0 ? v : 0.0; });
            t.inputs.push_back(std::move(act));
        }
        t.preacts.push_back(std::move(pre));
    }
    return t;
}

std::vector<double> squash(std::span<const double> preact)
{
    std::vector<double> z(preact.size());
    std::transform(preact.begin(), preact.end(), z.begin(), sigmoid);
    return z;
}

double reg_term(double x)
{
    // 2 sigmoid(x) - 1 == tanh(x / 2)
    return 1.0 - std::abs(std::tanh(0.5 * x));
}

double reg_slope(double x)
{
    if (x == 0.0) return 0.0;
    double t = std::tanh(0.5 * x);
    double magnitude = 0.5 * (1.0 - t * t);
    return x > 0.0 ? -magnitude : magnitude;
}

double pair_objective(const Model& model, const Pair& p, const HyperParams& hp)
{
    auto ta = run_layers(model, p.a);
    auto tb = run_layers(model, p.b);
    const auto& pa = ta.preacts.back();
    const auto& pb = tb.preacts.back();
    return contrastive_loss(squash(pa), squash(pb), p.label, hp.m1, hp.m2) + triangular_reg(pa, hp.lambda) +
           triangular_reg(pb, hp.lambda);
}

void check_batch(const Model& model, const PairBatch& batch, const HyperParams& hp)
{
    hp.validate();
    if (batch.pairs.empty()) throw std::invalid_argument("batch must contain at least one pair");
    for (const Pair& p : batch.pairs) {
        if (p.label != 0 && p.label != 1) throw std::invalid_argument("pair label must be 0 or 1");
        if (p.a.size() != model.input_dim() || p.b.size() != model.input_dim())
            throw std::invalid_argument("pair input length does not match model input_dim");
    }
}

// Accumulates d(objective)/d(params) for one branch given d/d(output preact).
void backprop(const Model& model, const Trace& trace, std::vector<double> delta, Gradients& grads)
{
    const auto& layers = model.layers();
    for (std::size_t l = layers.size(); l-- > 0;) {
        const DenseLayer& layer = layers[l];
        DenseLayer& g = grads[l];
        for (std::size_t i = 0; i < layer.outputs; ++i) {
            if (delta[i] == 0.0) continue;
            kernels::axpy(delta[i], trace.inputs[l], g.row(i));
            g.bias[i] += delta[i];
        }
        if (l == 0) break;
        std::vector<double> prev(layer.inputs, 0.0);
        for (std::size_t i = 0; i < layer.outputs; ++i)
            if (delta[i] != 0.0) kernels::axpy(delta[i], layer.row(i), prev);
        const auto& pre = trace.preacts[l - 1];
        for (std::size_t j = 0; j < prev.size(); ++j)
            if (!(pre[j] > 0.0)) prev[j] = 0.0;
        delta = std::move(prev);
    }
}

} // namespace

Model::Model(std::uint64_t seed, std::size_t input_dim, std::vector<std::size_t> hidden_dims, std::size_t embed_dim,
             std::vector<DenseLayer> layers)
    : seed_(seed), input_dim_(input_dim), hidden_dims_(std::move(hidden_dims)), embed_dim_(embed_dim),
      layers_(std::move(layers))
{
    if (input_dim_ == 0 || embed_dim_ == 0) throw std::invalid_argument("model dimensions must be >= 1");
    if (layers_.size() != hidden_dims_.size() + 1)
        throw std::invalid_argument("model must have one layer per hidden width plus the output layer");
    std::size_t width = input_dim_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const std::size_t out = l < hidden_dims_.size() ? hidden_dims_[l] : embed_dim_;
        const DenseLayer& layer = layers_[l];
        if (out == 0) throw std::invalid_argument("hidden widths must be >= 1");
        if (layer.inputs != width || layer.outputs != out || layer.weights.size() != width * out ||
            layer.bias.size() != out)
            throw std::invalid_argument("layer " + std::to_string(l) + " does not chain with its neighbours");
        width = out;
    }
}

Model init_model(std::uint64_t seed, std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                 std::size_t embed_dim)
{
    if (input_dim == 0 || embed_dim == 0) throw std::invalid_argument("init_model: dimensions must be >= 1");
    for (std::size_t h : hidden_dims)
        if (h == 0) throw std::invalid_argument("init_model: hidden widths must be >= 1");

    Rng rng(seed);
    std::vector<DenseLayer> layers;
    std::size_t width = input_dim;
    for (std::size_t l = 0; l <= hidden_dims.size(); ++l) {
        const std::size_t out = l < hidden_dims.size() ? hidden_dims[l] : embed_dim;
        DenseLayer layer = make_layer(width, out);
        const double s = std::sqrt(6.0 / double(width + out));
        for (double& w : layer.weights) w = rng.uniform(-s, s);
        layers.push_back(std::move(layer));
        width = out;
    }
    return Model(seed, input_dim, hidden_dims, embed_dim, std::move(layers));
}

double sigmoid(double x)
{
    double v;
    if (x >= 0.0) {
        v = 1.0 / (1.0 + std::exp(-x));
    } else {
        double e = std::exp(x);
        v = e / (1.0 + e);
    }
    return std::clamp(v, kSigmoidLow, kSigmoidHigh);
}

ForwardResult forward(const Model& model, std::span<const double> input)
{
    Trace t = run_layers(model, input);
    std::vector<double> pre = std::move(t.preacts.back());
    Embedding e(squash(pre));
    return ForwardResult{std::move(pre), std::move(e)};
}

double contrastive_loss(std::span<const double> z_a, std::span<const double> z_b, int y, double m1, double m2)
{
    if (z_a.size() != z_b.size()) throw std::invalid_argument("contrastive_loss: length mismatch");
    if (y != 0 && y != 1) throw std::invalid_argument("contrastive_loss: label must be 0 or 1");
    if (!(m1 < m2)) throw std::invalid_argument("contrastive_loss: requires m1 < m2");
    const double d2 = kernels::dist2(z_a, z_b);
    return y == 1 ? std::max(d2 - m1, 0.0) : std::max(m2 - d2, 0.0);
}

double contrastive_loss(const Embedding& z_a, const Embedding& z_b, int y, double m1, double m2)
{
    return contrastive_loss(z_a.values(), z_b.values(), y, m1, m2);
}

double triangular_reg(std::span<const double> preact, double lambda)
{
    if (lambda < 0.0) throw std::invalid_argument("triangular_reg: lambda must be >= 0");
    double s = 0.0;
    for (double x : preact) s += reg_term(x);
    return lambda * s;
}

void HyperParams::validate() const
{
    if (!(m1 >= 0.0)) throw std::invalid_argument("hyperparams: m1 must be >= 0");
    if (!(m2 > 0.0)) throw std::invalid_argument("hyperparams: m2 must be > 0");
    if (!(m1 < m2)) throw std::invalid_argument("hyperparams: m1 must be < m2");
    if (!(lambda >= 0.0)) throw std::invalid_argument("hyperparams: lambda must be >= 0");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("hyperparams: learning_rate must be > 0");
    if (pairs_per_epoch == 0 || batch_size == 0)
        throw std::invalid_argument("hyperparams: pairs_per_epoch and batch_size must be >= 1");
    if (!(genuine_fraction >= 0.0 && genuine_fraction <= 1.0))
        throw std::invalid_argument("hyperparams: genuine_fraction must be in [0, 1]");
}

double batch_objective(const Model& model, const PairBatch& batch, const HyperParams& hp)
{
    check_batch(model, batch, hp);
    double total = 0.0;
    for (const Pair& p : batch.pairs) total += pair_objective(model, p, hp);
    return total / double(batch.pairs.size());
}

Gradients gradients(const Model& model, const PairBatch& batch, const HyperParams& hp)
{
    check_batch(model, batch, hp);
    Gradients grads;
    for (const DenseLayer& layer : model.layers()) grads.push_back(make_layer(layer.inputs, layer.outputs));

    for (const Pair& p : batch.pairs) {
        Trace ta = run_layers(model, p.a);
        Trace tb = run_layers(model, p.b);
        const auto& pa = ta.preacts.back();
        const auto& pb = tb.preacts.back();
        const auto za = squash(pa);
        const auto zb = squash(pb);
        const double d2 = kernels::dist2(za, zb);

        // d loss / d d2
        double coeff = 0.0;
        if (p.label == 1 && d2 > hp.m1) coeff = 1.0;
        if (p.label == 0 && d2 < hp.m2) coeff = -1.0;

        const std::size_t n = pa.size();
        std::vector<double> delta_a(n), delta_b(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double g = coeff * 2.0 * (za[i] - zb[i]); // d loss / d z_a; negated for z_b
            delta_a[i] = g * za[i] * (1.0 - za[i]) + hp.lambda * reg_slope(pa[i]);
            delta_b[i] = -g * zb[i] * (1.0 - zb[i]) + hp.lambda * reg_slope(pb[i]);
        }
        backprop(model, ta, std::move(delta_a), grads);
        backprop(model, tb, std::move(delta_b), grads);
    }

    const double scale = 1.0 / double(batch.pairs.size());
    for (DenseLayer& g : grads) {
        for (double& w : g.weights) w *= scale;
        for (double& b : g.bias) b *= scale;
    }
    return grads;
}

// ------------------------------------------------------------------- data

void SyntheticDataset::validate() const
{
    if (classes == 0 || dim == 0) throw std::invalid_argument("dataset: classes and dim must be >= 1");
    std::vector<std::size_t> counts(classes, 0);
    for (const Sample& s : samples) {
        if (s.class_id < 0 || std::size_t(s.class_id) >= classes)
            throw std::invalid_argument("dataset: class id out of range");
        if (s.x.size() != dim) throw std::invalid_argument("dataset: sample has wrong dimension");
        ++counts[std::size_t(s.class_id)];
    }
    for (std::size_t c : counts)
        if (c < 2) throw std::invalid_argument("dataset: every class needs at least two samples");
}

SyntheticDataset gen_synthetic_dataset(std::uint64_t seed, std::size_t classes, std::size_t per_class,
                                       std::size_t dim, double noise_sigma)
{
    if (classes == 0 || dim == 0) throw std::invalid_argument("gen_synthetic_dataset: classes and dim must be >= 1");
    if (per_class < 2) throw std::invalid_argument("gen_synthetic_dataset: per_class must be >= 2");
    if (!(noise_sigma > 0.0)) throw std::invalid_argument("gen_synthetic_dataset: noise_sigma must be > 0");

    Rng rng(seed);
    std::vector<std::vector<double>> centers(classes, std::vector<double>(dim));
    for (auto& c : centers)
        for (double& v : c) v = rng.uniform(-1.0, 1.0);

    SyntheticDataset data{{}, classes, dim};
    data.samples.reserve(classes * per_class);
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t k = 0; k < per_class; ++k) {
            Sample s{centers[c], int(c)};
            for (double& v : s.x) v += noise_sigma * rng.normal();
            data.samples.push_back(std::move(s));
        }
    }
    return data;
}

std::pair<SyntheticDataset, SyntheticDataset> split_holdout(const SyntheticDataset& data,
                                                            std::size_t holdout_per_class)
{
    data.validate();
    std::vector<std::size_t> remaining(data.classes, 0);
    for (const Sample& s : data.samples) ++remaining[std::size_t(s.class_id)];

    SyntheticDataset train{{}, data.classes, data.dim};
    SyntheticDataset held{{}, data.classes, data.dim};
    std::vector<std::size_t> seen(data.classes, 0);
    for (const Sample& s : data.samples) {
        const auto c = std::size_t(s.class_id);
        const bool hold = seen[c]++ >= remaining[c] - std::min(remaining[c], holdout_per_class);
        (hold ? held : train).samples.push_back(s);
    }
    train.validate();
    return {std::move(train), std::move(held)};
}

PairBatch sample_pairs(const SyntheticDataset& data, std::uint64_t seed, std::size_t n_pairs, double genuine_fraction)
{
    if (n_pairs == 0) throw std::invalid_argument("sample_pairs: n_pairs must be >= 1");
    if (!(genuine_fraction >= 0.0 && genuine_fraction <= 1.0))
        throw std::invalid_argument("sample_pairs: genuine_fraction must be in [0, 1]");

    std::vector<std::vector<std::size_t>> by_class(data.classes);
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        int c = data.samples[i].class_id;
        if (c < 0 || std::size_t(c) >= data.classes) throw std::invalid_argument("sample_pairs: class id out of range");
        by_class[std::size_t(c)].push_back(i);
    }
    std::vector<std::size_t> genuine_classes, populated_classes;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() >= 2) genuine_classes.push_back(c);
        if (!by_class[c].empty()) populated_classes.push_back(c);
    }

    const auto n_genuine = std::size_t(std::llround(double(n_pairs) * genuine_fraction));
    const std::size_t n_impostor = n_pairs - n_genuine;
    if (n_genuine > 0 && genuine_classes.empty())
        throw std::invalid_argument("sample_pairs: genuine pairs need a class with two samples");
    if (n_impostor > 0 && populated_classes.size() < 2)
        throw std::invalid_argument("sample_pairs: impostor pairs need at least two classes");

    Rng rng(seed);
    PairBatch batch;
    batch.pairs.reserve(n_pairs);
    for (std::size_t i = 0; i < n_genuine; ++i) {
        const auto& members = by_class[genuine_classes[rng.index(genuine_classes.size())]];
        std::size_t first = rng.index(members.size());
        std::size_t second = rng.index(members.size() - 1);
        if (second >= first) ++second;
        batch.pairs.push_back(Pair{data.samples[members[first]].x, data.samples[members[second]].x, 1});
    }
    for (std::size_t i = 0; i < n_impostor; ++i) {
        std::size_t ca = rng.index(populated_classes.size());
        std::size_t cb = rng.index(populated_classes.size() - 1);
        if (cb >= ca) ++cb;
        const auto& ma = by_class[populated_classes[ca]];
        const auto& mb = by_class[populated_classes[cb]];
        batch.pairs.push_back(Pair{data.samples[ma[rng.index(ma.size())]].x, data.samples[mb[rng.index(mb.size())]].x, 0});
    }
    for (std::size_t i = batch.pairs.size(); i > 1; --i) std::swap(batch.pairs[i - 1], batch.pairs[rng.index(i)]);
    return batch;
}

// ---------------------------------------------------------------- training

TrainResult train(const Model& model, const SyntheticDataset& data, const HyperParams& hp)
{
    hp.validate();
    data.validate();
    if (data.dim != model.input_dim()) throw std::invalid_argument("train: dataset dim does not match model input_dim");

    TrainResult result{model, {}, 0.0};
    if (hp.epochs == 0) return result;

    const PairBatch eval = sample_pairs(data, mix_seed(hp.seed, kEvalStream), hp.pairs_per_epoch, hp.genuine_fraction);
    result.initial_objective = batch_objective(result.model, eval, hp);
    result.history.reserve(hp.epochs);

    for (std::uint32_t epoch = 0; epoch < hp.epochs; ++epoch) {
        PairBatch epoch_pairs =
            sample_pairs(data, mix_seed(hp.seed, kEpochStream + epoch), hp.pairs_per_epoch, hp.genuine_fraction);
        for (std::size_t start = 0; start < epoch_pairs.pairs.size(); start += hp.batch_size) {
            const std::size_t stop = std::min(start + hp.batch_size, epoch_pairs.pairs.size());
            PairBatch chunk;
            chunk.pairs.assign(std::make_move_iterator(epoch_pairs.pairs.begin() + std::ptrdiff_t(start)),
                               std::make_move_iterator(epoch_pairs.pairs.begin() + std::ptrdiff_t(stop)));
            Gradients g = gradients(result.model, chunk, hp);
            auto& layers = result.model.mutable_layers();
            for (std::size_t l = 0; l < layers.size(); ++l) {
                kernels::axpy(-hp.learning_rate, g[l].weights, layers[l].weights);
                kernels::axpy(-hp.learning_rate, g[l].bias, layers[l].bias);
            }
        }
        result.history.push_back(batch_objective(result.model, eval, hp));
    }
    return result;
}

// --------------------------------------------------------------------- I/O

namespace {

void append_array(std::string& out, std::span<const double> values)
{
    out += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += detail::format_double(values[i]);
    }
    out += ']';
}

std::vector<double> read_doubles(const nlohmann::json& v, const std::string& field, std::size_t expected)
{
    if (!v.is_array()) throw FormatError(field, "field '" + field + "' must be an array");
    if (v.size() != expected)
        throw FormatError(field, "field '" + field + "' has " + std::to_string(v.size()) + " values, expected " +
                                     std::to_string(expected));
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(detail::require_number(v[i], field));
    return out;
}

} // namespace

std::string model_to_json(const Model& model)
{
    std::string out = "{\n  \"input_dim\": " + std::to_string(model.input_dim()) + ",\n  \"hidden_dims\": [";
    for (std::size_t i = 0; i < model.hidden_dims().size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(model.hidden_dims()[i]);
    }
    out += "],\n  \"embed_dim\": " + std::to_string(model.embed_dim()) + ",\n  \"seed\": " +
           std::to_string(model.seed()) + ",\n  \"layers\": [";
    for (std::size_t l = 0; l < model.layers().size(); ++l) {
        const DenseLayer& layer = model.layers()[l];
        out += l ? ",\n    {\"weights\": " : "\n    {\"weights\": ";
        append_array(out, layer.weights);
        out += ", \"bias\": ";
        append_array(out, layer.bias);
        out += '}';
    }
    out += "\n  ]\n}\n";
    return out;
}

Model model_from_json(const std::string& text)
{
    auto doc = detail::parse_json(text, "model");
    const std::size_t input_dim = detail::require_unsigned(detail::require(doc, "input_dim"), "input_dim");
    const std::size_t embed_dim = detail::require_unsigned(detail::require(doc, "embed_dim"), "embed_dim");
    const std::uint64_t seed = detail::require_unsigned(detail::require(doc, "seed"), "seed");
    const auto& hidden_json = detail::require(doc, "hidden_dims");
    if (!hidden_json.is_array()) throw FormatError("hidden_dims", "field 'hidden_dims' must be an array");
    std::vector<std::size_t> hidden;
    for (const auto& h : hidden_json) {
        std::size_t w = detail::require_unsigned(h, "hidden_dims");
        if (w == 0) throw FormatError("hidden_dims", "hidden widths must be >= 1");
        hidden.push_back(w);
    }
    if (input_dim == 0) throw FormatError("input_dim", "field 'input_dim' must be >= 1");
    if (embed_dim == 0) throw FormatError("embed_dim", "field 'embed_dim' must be >= 1");

    const auto& layers_json = detail::require(doc, "layers");
    if (!layers_json.is_array() || layers_json.size() != hidden.size() + 1)
        throw FormatError("layers", "field 'layers' must hold one entry per hidden width plus the output layer");

    std::vector<DenseLayer> layers;
    std::size_t width = input_dim;
    for (std::size_t l = 0; l < layers_json.size(); ++l) {
        const std::size_t out = l < hidden.size() ? hidden[l] : embed_dim;
        const std::string at = "layers[" + std::to_string(l) + "].";
        DenseLayer layer{width, out, read_doubles(detail::require(layers_json[l], "weights"), at + "weights", width * out),
                         read_doubles(detail::require(layers_json[l], "bias"), at + "bias", out)};
        layers.push_back(std::move(layer));
        width = out;
    }
    return Model(seed, input_dim, std::move(hidden), embed_dim, std::move(layers));
}

Model read_model(const std::filesystem::path& path)
{
    return model_from_json(detail::read_text_file(path));
}

void write_model(const Model& model, const std::filesystem::path& path)
{
    detail::write_text_file(path, model_to_json(model));
}

} // namespace embedkey::metricnet
