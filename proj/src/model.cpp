#include "crslearn/model.hpp"

#include <algorithm>
#include <cmath>

#include "crslearn/errors.hpp"
#include "crslearn/logic.hpp"

namespace crslearn {

const char* to_string(Optimizer opt) { return opt == Optimizer::sgd ? "sgd" : "adam"; }

Optimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd") return Optimizer::sgd;
    if (s == "adam") return Optimizer::adam;
    throw ConfigError("unknown optimizer '" + s + "' (expected sgd or adam)");
}

void TrainConfig::validate() const {
    if (layer_widths.size() < 3 || layer_widths.size() % 2 == 0) {
        throw ConfigError("layer_widths must list an odd number (>= 3) of widths: input, 2L logical layers");
    }
    for (std::size_t w : layer_widths) {
        if (w < 1) throw ConfigError("layer widths must be >= 1");
    }
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
    if (!(lr_decay_factor > 0.0) || lr_decay_factor > 1.0) {
        throw ConfigError("lr_decay_factor must be in (0, 1]");
    }
    if (lr_decay_every < 1) throw ConfigError("lr_decay_every must be >= 1");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
    if (rb_rate < 0.0 || rb_rate > 1.0) throw ConfigError("rb_rate must be in [0, 1]");
    if (!(threshold > 0.0) || !(threshold < 1.0)) throw ConfigError("threshold must be in (0, 1)");
}

std::size_t TrainConfig::default_hidden_width(std::size_t binary_features) {
    std::size_t target = 2 * binary_features;
    std::size_t w = 32;
    while (w < target && w < 256) w *= 2;
    return w;
}

std::vector<std::size_t> TrainConfig::make_widths(std::size_t binary_features, std::size_t classes,
                                                  std::size_t logical_layers, std::size_t hidden_width) {
    if (logical_layers < 1 || logical_layers % 2 != 0) {
        throw ConfigError("the number of logical layers (2L) must be a positive even number");
    }
    std::vector<std::size_t> widths;
    widths.push_back(binary_features);
    for (std::size_t l = 1; l < logical_layers; ++l) widths.push_back(hidden_width);
    widths.push_back(classes);
    return widths;
}

MaskSet MaskSet::zeros_like(const MllpModel& model) {
    MaskSet m;
    m.rb_rate = 0.0;
    m.masks.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        m.masks.emplace_back(layer.w.rows, layer.w.cols);
    }
    return m;
}

MllpModel init_model(const TrainConfig& config) {
    config.validate();
    MllpModel model;
    model.widths = config.layer_widths;
    model.config = config;
    Rng rng(mix_seed(config.seed, 0x1217));
    for (std::size_t l = 1; l < config.layer_widths.size(); ++l) {
        WeightLayer layer;
        layer.kind = l % 2 == 1 ? LayerKind::conjunction : LayerKind::disjunction;
        layer.w = Matrix(config.layer_widths[l], config.layer_widths[l - 1]);
        for (double& v : layer.w.data) v = rng.uniform(0.1);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

MaskSet sample_masks(const MllpModel& model, double rb_rate, Rng& rng) {
    if (rb_rate < 0.0 || rb_rate > 1.0) throw ConfigError("rb_rate must be in [0, 1]");
    MaskSet m;
    m.rb_rate = rb_rate;
    m.masks.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        BinMatrix mask(layer.w.rows, layer.w.cols);
        for (auto& bit : mask.data) bit = rng.bernoulli(rb_rate) ? 1 : 0;
        m.masks.push_back(std::move(mask));
    }
    return m;
}

Matrix effective_weights(const Matrix& w, const BinMatrix& mask, double threshold) {
    if (w.rows != mask.rows || w.cols != mask.cols) {
        throw DimensionError("effective_weights: weight/mask shape mismatch");
    }
    Matrix out = w;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (mask.data[i]) out.data[i] = binarize_weight(w.data[i], threshold);
    }
    return out;
}

std::vector<std::vector<double>> mllp_forward(const MllpModel& model, const MaskSet& masks,
                                              std::span<const double> x) {
    if (x.size() != model.input_width()) {
        throw DimensionError("mllp_forward: input length " + std::to_string(x.size()) +
                             " != " + std::to_string(model.input_width()));
    }
    if (masks.masks.size() != model.layers.size()) {
        throw DimensionError("mllp_forward: mask set does not match model depth");
    }
    std::vector<std::vector<double>> acts;
    acts.reserve(model.layers.size() + 1);
    acts.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Matrix weff = effective_weights(model.layers[l].w, masks.masks[l], model.config.threshold);
        const std::vector<double>& prev = acts.back();
        std::vector<double> cur(weff.rows);
        for (std::size_t i = 0; i < weff.rows; ++i) {
            cur[i] = model.layers[l].kind == LayerKind::conjunction
                         ? conj_forward(prev, weff.row(i))
                         : disj_forward(prev, weff.row(i));
        }
        acts.push_back(std::move(cur));
    }
    return acts;
}

std::vector<double> mllp_output(const MllpModel& model, const MaskSet& masks,
                                std::span<const double> x) {
    return mllp_forward(model, masks, x).back();
}

std::size_t mllp_predict(const MllpModel& model, std::span<const std::uint8_t> x) {
    std::vector<double> xd(x.begin(), x.end());
    const std::vector<double> out = mllp_output(model, MaskSet::zeros_like(model), xd);
    std::size_t best = 0;
    for (std::size_t c = 1; c < out.size(); ++c) {
        if (out[c] > out[best]) best = c;  // first index wins ties
    }
    return best;
}

double mllp_loss(const Matrix& outputs, const Matrix& onehot_labels,
                 const std::vector<WeightLayer>& layers, double weight_decay) {
    if (outputs.rows != onehot_labels.rows || outputs.cols != onehot_labels.cols) {
        throw DimensionError("mllp_loss: output/label shape mismatch");
    }
    double mse_sum = 0.0;
    for (std::size_t i = 0; i < outputs.rows; ++i) {
        double inst = 0.0;
        for (std::size_t c = 0; c < outputs.cols; ++c) {
            const double d = outputs(i, c) - onehot_labels(i, c);
            inst += d * d;
        }
        mse_sum += inst / static_cast<double>(outputs.cols);
    }
    double reg = 0.0;
    if (weight_decay > 0.0) {
        for (const auto& layer : layers) {
            for (double w : layer.w.data) reg += w * w;
        }
    }
    return mse_sum / static_cast<double>(outputs.rows) + weight_decay * reg;
}

}  // namespace crslearn
