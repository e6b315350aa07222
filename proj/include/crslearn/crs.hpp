#ifndef CRSLEARN_CRS_HPP
#define CRSLEARN_CRS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "crslearn/binarizer.hpp"
#include "crslearn/matrix.hpp"

namespace crslearn {

enum class LayerKind { conjunction, disjunction };

const char* to_string(LayerKind kind);

/// Discrete concept-rule-sets classifier: alternating AND/OR layers over
/// binary adjacency matrices. Odd layers (1-based) are conjunctions (rules),
/// even layers disjunctions (rule sets); the last layer has one node per
/// class. Immutable once built; safe to share across threads.
struct CrsModel {
    std::vector<std::size_t> widths;   // [J, n_1, ..., n_2L = C]
    std::vector<BinMatrix> layers;     // layers[l-1] is the n_l x n_{l-1} adjacency of layer l
    FeatureDictionary dictionary;      // may be empty when trained on raw binary input
    std::size_t fallback_class = 0;    // predicted when no output node fires

    std::size_t depth() const { return layers.size(); }                 // 2L
    std::size_t input_width() const { return widths.front(); }          // J
    std::size_t class_count() const { return widths.back(); }           // C
    static LayerKind kind_of(std::size_t layer_1based) {
        return layer_1based % 2 == 1 ? LayerKind::conjunction : LayerKind::disjunction;
    }

    void validate() const;
};

/// Binary activation vector of one layer.
struct LayerRepresentation {
    std::size_t layer = 0;                 // 0 = input
    std::vector<std::uint8_t> values;
};

/// Evaluates every layer on one binary input; element [0] is the input
/// itself and the last element the per-class output vector. Conjunction
/// nodes AND their connected previous-layer nodes (empty connection set
/// gives 1), disjunction nodes OR theirs (empty set gives 0).
std::vector<LayerRepresentation> crs_forward(const CrsModel& crs, std::span<const std::uint8_t> x);

/// Per-class output vector only (last layer of crs_forward).
std::vector<std::uint8_t> crs_output(const CrsModel& crs, std::span<const std::uint8_t> x);

/// Smallest output index that fires; fallback_class when none does.
std::size_t predict(const CrsModel& crs, std::span<const std::uint8_t> x);

/// predict() plus whether the fallback rule was used.
std::pair<std::size_t, bool> predict_with_fallback_flag(const CrsModel& crs,
                                                        std::span<const std::uint8_t> x);

/// Total number of edges (1-entries) across all adjacency matrices.
std::size_t edge_count(const CrsModel& crs);

/// Reference to one node for rendering: layer 1..2L, node index in layer.
struct NodeRef {
    std::size_t layer = 0;
    std::size_t index = 0;
};

/// Renders a node as human-readable rule text. Level-1 rules print their
/// dictionary conditions joined by AND; rule sets print their member rules
/// joined by OR; deeper levels nest with indentation. Edges are rendered in
/// ascending index order, so the output is deterministic.
std::string render_rules(const CrsModel& crs, NodeRef node);

/// Renders every output node, labelled with its class name.
std::string render_all_rules(const CrsModel& crs);

}  // namespace crslearn

#endif
