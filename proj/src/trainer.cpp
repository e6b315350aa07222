#include "crslearn/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "crslearn/errors.hpp"
#include "crslearn/logic.hpp"
#include "crslearn/metrics.hpp"

namespace crslearn {

namespace {

// Activations and gradients are stored [node][instance] so that the inner
// loops run over the batch lane and vectorize.
struct Workspace {
    std::vector<Matrix> acts;    // acts[0] = input (J x B), acts[l] = layer l output
    std::vector<Matrix> grads;   // grads[l] = dLoss/d acts[l]
    std::size_t capacity = 0;

    void init(const std::vector<std::size_t>& widths, std::size_t batch_capacity) {
        capacity = batch_capacity;
        acts.clear();
        grads.clear();
        for (std::size_t w : widths) {
            acts.emplace_back(w, batch_capacity);
            grads.emplace_back(w, batch_capacity);
        }
    }
};

// out(i,b) = prod_j conj_selector(prev(j,b), w(i,j)). Weights equal to 0 or 1
// keep their exact algebraic shortcut, which also skips most of the work when
// masked entries dominate.
void conj_layer_forward(const Matrix& weff, const Matrix& prev, Matrix& out, std::size_t batch) {
    for (std::size_t i = 0; i < weff.rows; ++i) {
        double* o = out.data.data() + i * out.cols;
        std::fill(o, o + batch, 1.0);
        const double* wrow = weff.data.data() + i * weff.cols;
        for (std::size_t j = 0; j < weff.cols; ++j) {
            const double wij = wrow[j];
            if (wij == 0.0) continue;
            const double* h = prev.data.data() + j * prev.cols;
            if (wij == 1.0) {
                for (std::size_t b = 0; b < batch; ++b) o[b] *= h[b];
            } else {
                for (std::size_t b = 0; b < batch; ++b) o[b] *= 1.0 - wij * (1.0 - h[b]);
            }
        }
    }
}

// out(i,b) = 1 - prod_j (1 - prev(j,b) * w(i,j))
void disj_layer_forward(const Matrix& weff, const Matrix& prev, Matrix& out, std::size_t batch) {
    for (std::size_t i = 0; i < weff.rows; ++i) {
        double* o = out.data.data() + i * out.cols;
        std::fill(o, o + batch, 1.0);
        const double* wrow = weff.data.data() + i * weff.cols;
        for (std::size_t j = 0; j < weff.cols; ++j) {
            const double wij = wrow[j];
            if (wij == 0.0) continue;
            const double* h = prev.data.data() + j * prev.cols;
            for (std::size_t b = 0; b < batch; ++b) o[b] *= 1.0 - wij * h[b];
        }
        for (std::size_t b = 0; b < batch; ++b) o[b] = 1.0 - o[b];
    }
}

double conj_excl_recompute(const Matrix& weff, const Matrix& prev, std::size_t i, std::size_t skip,
                           std::size_t b) {
    double prod = 1.0;
    const double* wrow = weff.data.data() + i * weff.cols;
    for (std::size_t k = 0; k < weff.cols; ++k) {
        if (k == skip) continue;
        const double w = wrow[k];
        if (w == 0.0) continue;
        prod *= 1.0 - w * (1.0 - prev(k, b));
    }
    return prod;
}

double disj_excl_recompute(const Matrix& weff, const Matrix& prev, std::size_t i, std::size_t skip,
                           std::size_t b) {
    double prod = 1.0;
    const double* wrow = weff.data.data() + i * weff.cols;
    for (std::size_t k = 0; k < weff.cols; ++k) {
        if (k == skip) continue;
        const double w = wrow[k];
        if (w == 0.0) continue;
        prod *= 1.0 - w * prev(k, b);
    }
    return prod;
}

// Accumulates dLoss/dW for the unmasked entries of one layer and dLoss/dprev
// for the layer below. Masked entries are skipped entirely on the weight
// side: that is the (1 - M) gradient gate.
void conj_layer_backward(const Matrix& weff, const BinMatrix& mask, const Matrix& prev,
                         const Matrix& out, const Matrix& up, Matrix& grad_w, Matrix& grad_prev,
                         std::size_t batch, bool want_prev_grad) {
    for (std::size_t i = 0; i < weff.rows; ++i) {
        const double* u = up.data.data() + i * up.cols;
        const double* o = out.data.data() + i * out.cols;
        const double* wrow = weff.data.data() + i * weff.cols;
        const std::uint8_t* mrow = mask.data.data() + i * mask.cols;
        for (std::size_t j = 0; j < weff.cols; ++j) {
            const double wij = wrow[j];
            const bool gated = mrow[j] != 0;
            if (gated && wij == 0.0) continue;  // no weight grad, no input contribution
            const double* h = prev.data.data() + j * prev.cols;
            double gw = 0.0;
            if (wij == 0.0) {
                // selector is exactly 1: the exclusive product is the output
                for (std::size_t b = 0; b < batch; ++b) gw += u[b] * (h[b] - 1.0) * o[b];
            } else {
                double* gh = grad_prev.data.data() + j * grad_prev.cols;
                for (std::size_t b = 0; b < batch; ++b) {
                    const double f = 1.0 - wij * (1.0 - h[b]);
                    const double excl = f > kExclusionEps ? o[b] / f
                                                          : conj_excl_recompute(weff, prev, i, j, b);
                    if (!gated) gw += u[b] * (h[b] - 1.0) * excl;
                    if (want_prev_grad) gh[b] += u[b] * wij * excl;
                }
            }
            if (!gated) grad_w(i, j) += gw;
        }
    }
}

void disj_layer_backward(const Matrix& weff, const BinMatrix& mask, const Matrix& prev,
                         const Matrix& out, const Matrix& up, Matrix& grad_w, Matrix& grad_prev,
                         std::size_t batch, bool want_prev_grad) {
    for (std::size_t i = 0; i < weff.rows; ++i) {
        const double* u = up.data.data() + i * up.cols;
        const double* o = out.data.data() + i * out.cols;
        const double* wrow = weff.data.data() + i * weff.cols;
        const std::uint8_t* mrow = mask.data.data() + i * mask.cols;
        for (std::size_t j = 0; j < weff.cols; ++j) {
            const double wij = wrow[j];
            const bool gated = mrow[j] != 0;
            if (gated && wij == 0.0) continue;
            const double* h = prev.data.data() + j * prev.cols;
            double gw = 0.0;
            if (wij == 0.0) {
                for (std::size_t b = 0; b < batch; ++b) gw += u[b] * h[b] * (1.0 - o[b]);
            } else {
                double* gh = grad_prev.data.data() + j * grad_prev.cols;
                for (std::size_t b = 0; b < batch; ++b) {
                    const double f = 1.0 - wij * h[b];
                    const double excl = f > kExclusionEps ? (1.0 - o[b]) / f
                                                          : disj_excl_recompute(weff, prev, i, j, b);
                    if (!gated) gw += u[b] * h[b] * excl;
                    if (want_prev_grad) gh[b] += u[b] * wij * excl;
                }
            }
            if (!gated) grad_w(i, j) += gw;
        }
    }
}

std::string layer_norms(const MllpModel& model) {
    std::ostringstream os;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        double sq = 0.0;
        for (double w : model.layers[l].w.data) sq += w * w;
        os << (l ? ", " : "") << "layer" << l + 1 << "=" << std::sqrt(sq);
    }
    return os.str();
}

}  // namespace

MllpModel train(MllpModel model, const BinarizedDataset& data, const TrainOptions& opts) {
    const TrainConfig& cfg = model.config;
    cfg.validate();
    if (data.binary_feature_count() != model.input_width()) {
        throw DimensionError("train: data has " + std::to_string(data.binary_feature_count()) +
                             " binary features, model expects " + std::to_string(model.input_width()));
    }
    if (data.class_count() != model.class_count()) {
        throw DimensionError("train: data has " + std::to_string(data.class_count()) +
                             " classes, model expects " + std::to_string(model.class_count()));
    }
    const std::size_t n = data.n();
    const std::size_t depth = model.layers.size();
    const std::size_t batch_cap = std::min<std::size_t>(n, static_cast<std::size_t>(cfg.batch_size));

    // training-set majority class; extraction fallback (ties -> smaller id)
    {
        std::vector<std::size_t> counts(data.class_count(), 0);
        for (auto id : data.label_ids) counts[id]++;
        model.majority_class =
            std::max_element(counts.begin(), counts.end()) - counts.begin();
    }

    Rng rng(mix_seed(cfg.seed, 0x7e41));
    Workspace ws;
    ws.init(model.widths, batch_cap);

    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0);

    // W with masked entries binarized; unmasked entries mirror the master
    // weights and are refreshed after every update
    std::vector<Matrix> weff(depth);
    std::vector<Matrix> grad(depth);
    std::vector<Matrix> adam_m(depth), adam_v(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        grad[l] = Matrix(model.layers[l].w.rows, model.layers[l].w.cols);
        if (cfg.optimizer == Optimizer::adam) {
            adam_m[l] = Matrix(grad[l].rows, grad[l].cols);
            adam_v[l] = Matrix(grad[l].rows, grad[l].cols);
        }
    }
    long adam_t = 0;
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr =
            cfg.lr * std::pow(cfg.lr_decay_factor, static_cast<double>(epoch / cfg.lr_decay_every));
        const MaskSet masks = sample_masks(model, cfg.rb_rate, rng);
        rng.shuffle(indices);
        for (std::size_t l = 0; l < depth; ++l) {
            weff[l] = effective_weights(model.layers[l].w, masks.masks[l], cfg.threshold);
        }

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch_cap) {
            const std::size_t batch = std::min(batch_cap, n - start);

            Matrix& input = ws.acts[0];
            for (std::size_t b = 0; b < batch; ++b) {
                const auto row = data.features.row(indices[start + b]);
                for (std::size_t j = 0; j < row.size(); ++j) input(j, b) = row[j];
            }
            for (std::size_t l = 0; l < depth; ++l) {
                if (model.layers[l].kind == LayerKind::conjunction) {
                    conj_layer_forward(weff[l], ws.acts[l], ws.acts[l + 1], batch);
                } else {
                    disj_layer_forward(weff[l], ws.acts[l], ws.acts[l + 1], batch);
                }
            }

            // loss and output gradient; per-instance MSE is the mean over the
            // C output dimensions
            const Matrix& out = ws.acts[depth];
            const std::size_t C = model.class_count();
            double batch_mse = 0.0;
            Matrix& gout = ws.grads[depth];
            const double gscale = 2.0 / (static_cast<double>(C) * static_cast<double>(batch));
            for (std::size_t c = 0; c < C; ++c) {
                for (std::size_t b = 0; b < batch; ++b) {
                    const double y = data.labels(indices[start + b], c) ? 1.0 : 0.0;
                    const double d = out(c, b) - y;
                    batch_mse += d * d;
                    gout(c, b) = gscale * d;
                }
            }
            batch_mse /= static_cast<double>(C) * static_cast<double>(batch);
            double reg = 0.0;
            if (cfg.weight_decay > 0.0) {
                for (std::size_t l = 0; l < depth; ++l) {
                    for (double w : weff[l].data) reg += w * w;
                }
            }
            const double batch_loss = batch_mse + cfg.weight_decay * reg;
            if (!std::isfinite(batch_loss)) {
                std::ostringstream os;
                os << "train: non-finite loss at epoch " << epoch + 1 << ", batch "
                   << start / batch_cap + 1 << " (weight norms: " << layer_norms(model) << ")";
                throw NumericError(os.str());
            }
            loss_sum += batch_loss * static_cast<double>(batch);

            for (std::size_t l = depth; l-- > 0;) {
                std::fill(grad[l].data.begin(), grad[l].data.end(), 0.0);
                const bool want_prev = l > 0;
                if (want_prev) {
                    auto& gp = ws.grads[l];
                    std::fill(gp.data.begin(), gp.data.end(), 0.0);
                }
                if (model.layers[l].kind == LayerKind::conjunction) {
                    conj_layer_backward(weff[l], masks.masks[l], ws.acts[l], ws.acts[l + 1],
                                        ws.grads[l + 1], grad[l], ws.grads[l], batch, want_prev);
                } else {
                    disj_layer_backward(weff[l], masks.masks[l], ws.acts[l], ws.acts[l + 1],
                                        ws.grads[l + 1], grad[l], ws.grads[l], batch, want_prev);
                }
            }

            // update the unmasked entries only (the (1 - M) gate), then clip
            // back into [0,1]; the L2 term rides along inside the gated
            // gradient. Masked entries keep their weights and moments.
            const double two_lambda = 2.0 * cfg.weight_decay;
            if (cfg.optimizer == Optimizer::adam) ++adam_t;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t));
            for (std::size_t l = 0; l < depth; ++l) {
                Matrix& w = model.layers[l].w;
                const BinMatrix& m = masks.masks[l];
                for (std::size_t idx = 0; idx < w.data.size(); ++idx) {
                    if (m.data[idx]) continue;
                    const double g = grad[l].data[idx] + two_lambda * w.data[idx];
                    double step;
                    if (cfg.optimizer == Optimizer::adam) {
                        double& mm = adam_m[l].data[idx];
                        double& vv = adam_v[l].data[idx];
                        mm = kBeta1 * mm + (1.0 - kBeta1) * g;
                        vv = kBeta2 * vv + (1.0 - kBeta2) * g * g;
                        step = lr * (mm / bc1) / (std::sqrt(vv / bc2) + kAdamEps);
                    } else {
                        step = lr * g;
                    }
                    const double updated = clip_weight(w.data[idx] - step);
                    w.data[idx] = updated;
                    weff[l].data[idx] = updated;
                }
            }
        }

        if (opts.log) {
            EpochLog entry;
            entry.epoch = epoch + 1;
            entry.lr = lr;
            entry.mean_loss = loss_sum / static_cast<double>(n);
            if (opts.log_crs_f1) {
                const CrsModel crs = extract_crs(model, cfg.threshold);
                std::vector<std::size_t> preds(n);
                for (std::size_t i = 0; i < n; ++i) preds[i] = predict(crs, data.features.row(i));
                const std::vector<std::size_t> truths(data.label_ids.begin(), data.label_ids.end());
                entry.crs_train_f1 = macro_f1(preds, truths, data.class_count());
            }
            opts.log(entry);
        }
    }
    return model;
}

CrsModel extract_crs(const MllpModel& model, double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0)) throw ConfigError("threshold must be in (0, 1)");
    CrsModel crs;
    crs.widths = model.widths;
    crs.dictionary = model.dictionary;
    crs.fallback_class = model.majority_class;
    crs.layers.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        BinMatrix b(layer.w.rows, layer.w.cols);
        for (std::size_t i = 0; i < b.data.size(); ++i) {
            b.data[i] = binarize_weight(layer.w.data[i], threshold);
        }
        crs.layers.push_back(std::move(b));
    }
    return crs;
}

}  // namespace crslearn
