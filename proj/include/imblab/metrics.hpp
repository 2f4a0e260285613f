#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "imblab/dataset.hpp"
#include "imblab/stats.hpp"

namespace imblab {

/// Ratio of the two classes' variances along the direction w:
/// (w' Sa w) / (w' Sb w). Scale-invariant in w. A vanishing denominator is a
/// degenerate direction and is rejected.
double variance_imbalance_nu(const DenseMatrix& sigma_a, const DenseMatrix& sigma_b,
                             std::span<const double> w);

/// w' S w (scales with |w|^2).
double mapped_variance(std::span<const double> w, const DenseMatrix& sigma);

/// w' S w / w'w (invariant under w <- c w).
double projected_variance(std::span<const double> w, const DenseMatrix& sigma);

struct DistanceStats {
    DenseMatrix delta;                      // pairwise center distances, zero diagonal
    double mean_distance = 0.0;             // mean over unordered pairs
    std::vector<double> per_class_average;  // row mean excluding the diagonal
};

/// Euclidean distances between class centers (rows of `centers`).
DistanceStats distance_stats(const DenseMatrix& centers);

/// Sum over unordered pairs of (squared distance - u)^2 where u is the mean
/// squared pairwise distance; zero exactly when all centers are equidistant.
double equidistance_penalty(const DenseMatrix& centers);

struct LdiResult {
    std::vector<double> per_node;   // heterophilous-neighbor fraction, 0 for isolated nodes
    std::vector<double> per_class;  // mean over the class's nodes
};

/// Local distribution index: the fraction of a node's neighbors carrying a
/// different label. Self-loops count the node as its own same-class
/// neighbor.
LdiResult ldi(const Dataset& data);

/// Everything above on one dataset or stats list. Pairwise direction
/// vectors default to mu_y - mu_c when no classifier is supplied.
struct ImbalanceReport {
    std::vector<double> proportions;
    DenseMatrix variance_nu;     // (y,c) -> nu along the pair direction
    DenseMatrix mapped_var;      // (y,c) -> mapped variance of class y
    DenseMatrix projected_var;   // (y,c) -> projected variance of class y
    DistanceStats distances;
    double equidistance = 0.0;
    std::optional<LdiResult> ldi;  // graphs only
};

ImbalanceReport report(const std::vector<ClassStats>& stats,
                       const std::vector<std::vector<double>>* pair_directions = nullptr);
ImbalanceReport report(const Dataset& data);

void write_report_json(std::ostream& os, const ImbalanceReport& rep);
/// Flat CSV, one row per ordered class pair.
void write_report_csv(std::ostream& os, const ImbalanceReport& rep);

}  // namespace imblab
