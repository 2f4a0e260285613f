#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "imblab/matrix.hpp"

namespace imblab {

/// Undirected edge between node indices. Self-loops are allowed and count
/// the node as its own (same-class) neighbor.
using Edge = std::pair<int, int>;

/// Universal sample container: features + integer labels, plus an optional
/// undirected adjacency list for graph tasks.
struct Dataset {
    DenseMatrix features;         // n x d
    std::vector<int> labels;      // n, values in [0, C)
    std::optional<std::vector<Edge>> adjacency;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }
    int num_classes() const;

    /// Throws std::invalid_argument when labels/features/adjacency disagree.
    void validate() const;
};

}  // namespace imblab
