#ifndef CRSLEARN_MODEL_HPP
#define CRSLEARN_MODEL_HPP

#include <cstdint>
#include <vector>

#include "crslearn/binarizer.hpp"
#include "crslearn/crs.hpp"
#include "crslearn/matrix.hpp"
#include "crslearn/rng.hpp"

namespace crslearn {

enum class Optimizer { sgd, adam };

const char* to_string(Optimizer opt);
Optimizer optimizer_from_string(const std::string& s);

/// Training hyperparameters. Defaults follow the published recipe: four
/// logical layers, batch 128, 400 epochs, lr 5e-3 decayed by 0.75 every 100
/// epochs, weight decay 1e-8, binarization threshold 0.5.
struct TrainConfig {
    std::vector<std::size_t> layer_widths;  // [J, n_1, ..., C]; odd length >= 3
    int epochs = 400;
    int batch_size = 128;
    double lr = 5e-3;
    double lr_decay_factor = 0.75;
    int lr_decay_every = 100;
    double weight_decay = 1e-8;             // lambda
    double rb_rate = 0.8;                   // P, fraction of weights binarized per epoch
    double threshold = 0.5;                 // T, strict binarization cutoff
    // Plain gradient descent by default. Gradient magnitudes differ by
    // orders of magnitude between the product layers, so the adaptive
    // variant is what actually reaches the published accuracy within the
    // 400-epoch budget.
    Optimizer optimizer = Optimizer::sgd;
    std::uint64_t seed = 0;

    void validate() const;

    /// Middle-layer width heuristic: next power of two >= 2J, clamped to
    /// [32, 256].
    static std::size_t default_hidden_width(std::size_t binary_features);

    /// [J, w, ..., w, C] with `logical_layers` weight matrices.
    static std::vector<std::size_t> make_widths(std::size_t binary_features, std::size_t classes,
                                                std::size_t logical_layers, std::size_t hidden_width);
};

/// One fully connected logical layer of the continuous network.
struct WeightLayer {
    LayerKind kind = LayerKind::conjunction;
    Matrix w;  // n_l x n_{l-1}, entries kept in [0,1] by clipping
};

/// Continuous relaxation of the rule-sets model: alternating soft-AND /
/// soft-OR layers with weights in [0,1].
struct MllpModel {
    std::vector<std::size_t> widths;
    std::vector<WeightLayer> layers;
    TrainConfig config;
    FeatureDictionary dictionary;
    std::size_t majority_class = 0;  // training-set majority; extraction fallback

    std::size_t depth() const { return layers.size(); }
    std::size_t input_width() const { return widths.front(); }
    std::size_t class_count() const { return widths.back(); }
};

/// Per-layer Bernoulli(P) masks selecting the weights that are binarized and
/// frozen for one epoch.
struct MaskSet {
    std::vector<BinMatrix> masks;
    double rb_rate = 0.0;
    int epoch = 0;

    /// All-zero masks shaped like the model (the P=0 / no-RB case).
    static MaskSet zeros_like(const MllpModel& model);
};

/// Weights drawn i.i.d. Uniform(0, 0.1); deterministic given config.seed.
MllpModel init_model(const TrainConfig& config);

/// Independent Bernoulli(P) draw per weight entry.
MaskSet sample_masks(const MllpModel& model, double rb_rate, Rng& rng);

/// Masked entries replaced by their binarized value, the rest passed
/// through.
Matrix effective_weights(const Matrix& w, const BinMatrix& mask, double threshold);

/// Forward pass on one input with masked-binarized weights; returns every
/// activation vector, [0] being the input and the last the length-C output.
std::vector<std::vector<double>> mllp_forward(const MllpModel& model, const MaskSet& masks,
                                              std::span<const double> x);

/// Output activations only.
std::vector<double> mllp_output(const MllpModel& model, const MaskSet& masks,
                                std::span<const double> x);

/// Argmax decoding of the continuous output (first index on ties).
std::size_t mllp_predict(const MllpModel& model, std::span<const std::uint8_t> x);

/// Mean over the batch of per-instance MSE (mean over the C output
/// dimensions) plus weight_decay times the sum of squared weights.
double mllp_loss(const Matrix& outputs, const Matrix& onehot_labels,
                 const std::vector<WeightLayer>& layers, double weight_decay);

}  // namespace crslearn

#endif
