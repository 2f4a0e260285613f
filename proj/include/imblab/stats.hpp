#pragma once

#include <span>
#include <vector>

#include "imblab/dataset.hpp"
#include "imblab/matrix.hpp"
#include "imblab/rng.hpp"

namespace imblab {

/// Per-class first and second moments plus the class proportion.
struct ClassStats {
    std::vector<double> mean;
    DenseMatrix cov;
    double proportion = 0.0;
};

/// Draw n samples from N(mean, cov). Returns an n x d matrix; n = 0 yields
/// an empty matrix that still carries d columns. The covariance must be
/// symmetric PSD (after any shrinkage applied by the caller).
DenseMatrix sample_mvn(std::span<const double> mean, const DenseMatrix& cov, std::size_t n,
                       RngStream& rng);

struct ClassStatsOptions {
    bool diagonal_only = false;  // skip off-diagonal covariance (large d)
    double shrinkage_scale = 1e-6;
};

/// Empirical per-class proportions, means and covariances. Covariance uses
/// the N-1 denominator (zero matrix for singleton classes) and is shrunk by
/// eps*I with eps = shrinkage_scale * trace/d (falling back to
/// shrinkage_scale itself when the trace vanishes) so downstream quadratic
/// forms stay PSD.
std::vector<ClassStats> estimate_class_stats(const Dataset& data,
                                             const ClassStatsOptions& opts = {});

/// Same estimator on an explicit feature matrix (used when the "final
/// feature" is a hidden representation rather than the raw input).
std::vector<ClassStats> estimate_class_stats(const DenseMatrix& features,
                                             const std::vector<int>& labels,
                                             const ClassStatsOptions& opts = {});

}  // namespace imblab
