#ifndef CRSLEARN_TRAINER_HPP
#define CRSLEARN_TRAINER_HPP

#include <functional>

#include "crslearn/model.hpp"

namespace crslearn {

struct EpochLog {
    int epoch = 0;            // 1-based
    double lr = 0.0;
    double mean_loss = 0.0;   // instance-weighted mean of batch losses
    double crs_train_f1 = -1.0;  // only when requested, else -1
};
using EpochLogFn = std::function<void(const EpochLog&)>;

struct TrainOptions {
    bool log_crs_f1 = false;  // per-epoch macro-F1 of the extracted rules on the training set
    EpochLogFn log;
};

/// Mini-batch gradient descent with Random Binarization: each epoch a fresh
/// Bernoulli(P) subset of weights is binarized and frozen (their gradient is
/// gated to zero), the rest are updated and clipped back into [0,1]. The
/// continuous master weights persist across mask changes. Deterministic
/// given config.seed.
MllpModel train(MllpModel model, const BinarizedDataset& data, const TrainOptions& opts = {});

/// Binarizes every weight at `threshold` into a discrete rule-sets model.
/// The fallback class is the training majority recorded on the model.
CrsModel extract_crs(const MllpModel& model, double threshold);

}  // namespace crslearn

#endif
