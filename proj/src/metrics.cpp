#include "crslearn/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "crslearn/errors.hpp"
#include "crslearn/rng.hpp"

namespace crslearn {

double macro_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                std::size_t num_classes) {
    if (predictions.size() != truths.size()) {
        throw DimensionError("macro_f1: predictions/truths length mismatch");
    }
    if (num_classes == 0) throw ConfigError("macro_f1: num_classes must be positive");
    std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const std::size_t t = truths[i];
        const std::size_t p = predictions[i];
        if (t >= num_classes || p >= num_classes) {
            throw DataError("macro_f1: label out of range");
        }
        if (p == t) {
            tp[t]++;
        } else {
            fp[p]++;
            fn[t]++;
        }
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
        if (denom > 0) sum += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
    }
    return sum / static_cast<double>(num_classes);
}

KFoldResult stratified_kfold(std::span<const std::uint32_t> labels, std::size_t k,
                             std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
    if (k > n) throw ConfigError("stratified_kfold: k exceeds the instance count");

    std::uint32_t max_label = 0;
    for (auto l : labels) max_label = std::max(max_label, l);
    std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < n; ++i) buckets[labels[i]].push_back(i);

    bool can_stratify = true;
    for (const auto& b : buckets) {
        if (!b.empty() && b.size() < k) can_stratify = false;
    }

    Rng rng(mix_seed(seed, 0x5f01));
    std::vector<std::vector<std::size_t>> fold_members(k);
    if (can_stratify) {
        // deal each class round-robin with a running cursor so fold sizes
        // stay balanced across classes
        std::size_t cursor = 0;
        for (auto& bucket : buckets) {
            rng.shuffle(bucket);
            for (std::size_t idx : bucket) fold_members[cursor++ % k].push_back(idx);
        }
    } else {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (std::size_t i = 0; i < n; ++i) fold_members[i % k].push_back(order[i]);
    }

    KFoldResult result;
    result.stratified = can_stratify;
    result.folds.resize(k);
    for (std::size_t f = 0; f < k; ++f) {
        auto& test = result.folds[f].test;
        test = fold_members[f];
        std::sort(test.begin(), test.end());
        auto& train = result.folds[f].train;
        train.reserve(n - test.size());
        std::size_t t = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (t < test.size() && test[t] == i) {
                ++t;
            } else {
                train.push_back(i);
            }
        }
    }
    return result;
}

FoldSplit stratified_split(std::span<const std::uint32_t> labels, double first_fraction,
                           std::uint64_t seed) {
    if (!(first_fraction > 0.0) || !(first_fraction < 1.0)) {
        throw ConfigError("stratified_split: fraction must be in (0, 1)");
    }
    std::uint32_t max_label = 0;
    for (auto l : labels) max_label = std::max(max_label, l);
    std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < labels.size(); ++i) buckets[labels[i]].push_back(i);

    Rng rng(mix_seed(seed, 0x5f02));
    FoldSplit split;
    for (auto& bucket : buckets) {
        if (bucket.empty()) continue;
        rng.shuffle(bucket);
        std::size_t take = static_cast<std::size_t>(first_fraction * static_cast<double>(bucket.size()) + 0.5);
        take = std::clamp<std::size_t>(take, bucket.size() > 1 ? 1 : bucket.size(), bucket.size());
        for (std::size_t i = 0; i < bucket.size(); ++i) {
            (i < take ? split.train : split.test).push_back(bucket[i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

CrsEvaluation evaluate_crs(const CrsModel& crs, const BinarizedDataset& data) {
    CrsEvaluation eval;
    eval.predictions.reserve(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        auto [cls, fell_back] = predict_with_fallback_flag(crs, data.features.row(i));
        eval.predictions.push_back(cls);
        if (fell_back) eval.fallback_count++;
    }
    std::vector<std::size_t> truths(data.label_ids.begin(), data.label_ids.end());
    eval.f1 = macro_f1(eval.predictions, truths, data.class_count());
    return eval;
}

}  // namespace crslearn
