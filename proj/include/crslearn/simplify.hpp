#ifndef CRSLEARN_SIMPLIFY_HPP
#define CRSLEARN_SIMPLIFY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "crslearn/crs.hpp"

namespace crslearn {

enum class DeadCause { no_path, never_activated };

struct DeadNode {
    std::size_t layer = 0;   // 1..2L-1 (middle layers only)
    std::size_t index = 0;
    DeadCause cause = DeadCause::no_path;
};

struct SimplificationReport {
    std::size_t edges_before = 0;
    std::size_t edges_after = 0;
    // indexed by layer (0..2L); only middle layers can be non-zero
    std::vector<std::size_t> no_path_removed;
    std::vector<std::size_t> never_activated_removed;
    std::size_t redundant_edges_removed = 0;
    std::size_t iterations = 0;

    std::size_t dead_nodes_total() const;
};

/// Middle-layer nodes that sit on no input-to-output path (either side
/// unreachable), plus — when training data is given — nodes that never
/// evaluate to 1 on any training instance. A node failing both tests is
/// reported with the structural cause.
std::vector<DeadNode> detect_dead_nodes(const CrsModel& crs,
                                        const BinarizedDataset* train = nullptr);

/// Drops the given middle-layer nodes: their rows, and their columns in the
/// following layer. Input and output nodes cannot be removed.
CrsModel remove_nodes(const CrsModel& crs, std::span<const DeadNode> nodes);

/// 1 iff every set position of `sub` is set in `super`.
std::uint8_t subset(std::span<const std::uint8_t> sub, std::span<const std::uint8_t> super);

/// Zeroes every edge whose source node is logically dominated by a sibling
/// whose previous-layer row is a subset of its own (subsumption). Edges to
/// identical rows keep only the smallest-index duplicate. Returns the number
/// of edges removed; output-equivalent for every input.
std::size_t eliminate_redundant(CrsModel& crs);

struct SimplifyOptions {
    bool redundancy = true;
    bool dead_nodes = true;
    /// Skip the activation-based (training-data) dead-node test. The
    /// structural test alone preserves outputs on all inputs.
    bool structural_only = false;
};

/// Alternates subsumption elimination and dead-node removal to a fixpoint.
/// The structural removal is restricted to nodes with no path to the output
/// layer, which is exactly output-preserving; activation-based removal
/// additionally preserves every training-set prediction.
std::pair<CrsModel, SimplificationReport> simplify(const CrsModel& crs,
                                                   const BinarizedDataset* train = nullptr,
                                                   const SimplifyOptions& opts = {});

}  // namespace crslearn

#endif
