#ifndef CRSLEARN_METRICS_HPP
#define CRSLEARN_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "crslearn/crs.hpp"

namespace crslearn {

/// Unweighted mean over all C classes of per-class F1. A class with zero
/// precision+recall (including one absent from both vectors) contributes 0.
/// Result in [0, 1].
double macro_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                std::size_t num_classes);

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct KFoldResult {
    std::vector<FoldSplit> folds;
    bool stratified = true;  // false = fell back to plain shuffled k-fold
};

/// Stratified k-fold split of N instances by class id: per-fold class counts
/// are within one instance of exact proportionality. Classes with fewer than
/// k instances force a fallback to a plain shuffled k-fold (flagged).
/// Deterministic given seed.
KFoldResult stratified_kfold(std::span<const std::uint32_t> labels, std::size_t k,
                             std::uint64_t seed);

/// Stratified two-way split; `second` receives ~(1 - first_fraction) of each
/// class (at least one instance per class in `first` when possible).
FoldSplit stratified_split(std::span<const std::uint32_t> labels, double first_fraction,
                           std::uint64_t seed);

struct CrsEvaluation {
    double f1 = 0.0;                     // macro-F1 in [0,1]
    std::size_t fallback_count = 0;      // predictions decided by the fallback class
    std::vector<std::size_t> predictions;
};

/// Runs the discrete model over every instance.
CrsEvaluation evaluate_crs(const CrsModel& crs, const BinarizedDataset& data);

}  // namespace crslearn

#endif
