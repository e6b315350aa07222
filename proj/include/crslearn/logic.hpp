#ifndef CRSLEARN_LOGIC_HPP
#define CRSLEARN_LOGIC_HPP

#include <algorithm>
#include <span>
#include <string>

#include "crslearn/errors.hpp"
#include "crslearn/matrix.hpp"

namespace crslearn {

// Selector functions. With w = 1 they pass h through; with w = 0 they replace
// h by the neutral element of the surrounding product, so an input only takes
// part in the operation when it is selected.
inline double conj_selector(double h, double w) { return 1.0 - w * (1.0 - h); }
inline double disj_selector(double h, double w) { return h * w; }

inline void check_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

/// Soft AND over the inputs selected by one weight row. Binary operands give
/// the exact Boolean conjunction; an all-zero row gives the empty-product 1.
inline double conj_forward(std::span<const double> h, std::span<const double> w) {
    check_same_length(h.size(), w.size(), "conj_forward");
    double prod = 1.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        prod *= conj_selector(h[j], w[j]);
    }
    return prod;
}

/// Soft OR over the inputs selected by one weight row. Binary operands give
/// the exact Boolean disjunction; an all-zero row gives 0.
inline double disj_forward(std::span<const double> h, std::span<const double> w) {
    check_same_length(h.size(), w.size(), "disj_forward");
    double prod = 1.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
        prod *= 1.0 - disj_selector(h[j], w[j]);
    }
    return 1.0 - prod;
}

// Threshold below which a product factor is treated as too small to divide
// back out; the exclusive product is then rebuilt by re-multiplication.
inline constexpr double kExclusionEps = 1e-12;

namespace detail {

// prod over k != j of factor(k), given the full product. Divides the full
// product by factor(j) unless that factor is (near) zero.
template <typename FactorFn>
double product_excluding(std::size_t j, std::size_t n, double full, FactorFn factor) {
    const double fj = factor(j);
    if (fj > kExclusionEps) {
        return full / fj;
    }
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != j) prod *= factor(k);
    }
    return prod;
}

}  // namespace detail

/// Gradients of conj_forward w.r.t. the weight row and the input vector,
/// scaled by an upstream derivative.
inline void conj_backward(std::span<const double> h, std::span<const double> w, double upstream,
                          std::span<double> grad_w, std::span<double> grad_h) {
    check_same_length(h.size(), w.size(), "conj_backward");
    check_same_length(grad_w.size(), w.size(), "conj_backward grad_w");
    check_same_length(grad_h.size(), h.size(), "conj_backward grad_h");
    const std::size_t n = h.size();
    double full = 1.0;
    for (std::size_t j = 0; j < n; ++j) full *= conj_selector(h[j], w[j]);
    auto factor = [&](std::size_t k) { return conj_selector(h[k], w[k]); };
    for (std::size_t j = 0; j < n; ++j) {
        const double excl = detail::product_excluding(j, n, full, factor);
        grad_w[j] = upstream * (h[j] - 1.0) * excl;
        grad_h[j] = upstream * w[j] * excl;
    }
}

/// Gradients of disj_forward w.r.t. the weight row and the input vector.
inline void disj_backward(std::span<const double> h, std::span<const double> w, double upstream,
                          std::span<double> grad_w, std::span<double> grad_h) {
    check_same_length(h.size(), w.size(), "disj_backward");
    check_same_length(grad_w.size(), w.size(), "disj_backward grad_w");
    check_same_length(grad_h.size(), h.size(), "disj_backward grad_h");
    const std::size_t n = h.size();
    double full = 1.0;
    for (std::size_t j = 0; j < n; ++j) full *= 1.0 - disj_selector(h[j], w[j]);
    auto factor = [&](std::size_t k) { return 1.0 - disj_selector(h[k], w[k]); };
    for (std::size_t j = 0; j < n; ++j) {
        const double excl = detail::product_excluding(j, n, full, factor);
        grad_w[j] = upstream * h[j] * excl;
        grad_h[j] = upstream * w[j] * excl;
    }
}

/// Projects every entry back into [0,1]. Applied after each optimizer step,
/// never inside the gradient computation.
inline double clip_weight(double w) { return std::max(0.0, std::min(1.0, w)); }

inline void clip_weights(Matrix& w) {
    for (double& x : w.data) x = clip_weight(x);
}

/// Strict 0-1 indicator: 1 iff w > threshold.
inline std::uint8_t binarize_weight(double w, double threshold) {
    return w > threshold ? 1 : 0;
}

}  // namespace crslearn

#endif
