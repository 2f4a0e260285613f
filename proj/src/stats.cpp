#include "imblab/stats.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace imblab {

int Dataset::num_classes() const {
    int c = 0;
    for (int l : labels) c = std::max(c, l + 1);
    return c;
}

void Dataset::validate() const {
    if (features.rows() != labels.size())
        throw std::invalid_argument("Dataset: feature rows != label count");
    for (int l : labels)
        if (l < 0) throw std::invalid_argument("Dataset: negative label");
    if (adjacency) {
        int n = static_cast<int>(labels.size());
        for (const auto& [a, b] : *adjacency)
            if (a < 0 || b < 0 || a >= n || b >= n)
                throw std::invalid_argument("Dataset: adjacency references invalid node index");
    }
}

DenseMatrix sample_mvn(std::span<const double> mean, const DenseMatrix& cov, std::size_t n,
                       RngStream& rng) {
    const std::size_t d = mean.size();
    if (cov.rows() != d || cov.cols() != d)
        throw std::invalid_argument("sample_mvn: mean/cov dimension mismatch");
    if (!cov.is_symmetric())
        throw std::invalid_argument("sample_mvn: covariance not symmetric");
    DenseMatrix chol = cholesky_psd(cov);  // throws if not PSD

    DenseMatrix out(n, d);
    std::vector<double> z(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) z[j] = rng.next_normal();
        auto row = out.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            double s = mean[j];
            for (std::size_t k = 0; k <= j; ++k) s += chol(j, k) * z[k];
            row[j] = s;
        }
    }
    return out;
}

std::vector<ClassStats> estimate_class_stats(const DenseMatrix& features,
                                             const std::vector<int>& labels,
                                             const ClassStatsOptions& opts) {
    const std::size_t n = labels.size();
    if (n == 0) throw std::invalid_argument("estimate_class_stats: empty dataset");
    if (features.rows() != n)
        throw std::invalid_argument("estimate_class_stats: feature rows != label count");
    const std::size_t d = features.cols();

    int num_classes = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("estimate_class_stats: negative label");
        num_classes = std::max(num_classes, l + 1);
    }

    std::vector<std::size_t> counts(num_classes, 0);
    for (int l : labels) ++counts[l];
    for (int c = 0; c < num_classes; ++c)
        if (counts[c] == 0)
            throw std::invalid_argument("estimate_class_stats: class " + std::to_string(c) +
                                        " has no samples");

    std::vector<ClassStats> stats(num_classes);
    for (int c = 0; c < num_classes; ++c) {
        stats[c].mean.assign(d, 0.0);
        stats[c].cov = DenseMatrix(d, d);
        stats[c].proportion = static_cast<double>(counts[c]) / static_cast<double>(n);
    }

    for (std::size_t i = 0; i < n; ++i) {
        auto row = features.row(i);
        auto& m = stats[labels[i]].mean;
        for (std::size_t j = 0; j < d; ++j) m[j] += row[j];
    }
    for (int c = 0; c < num_classes; ++c)
        for (std::size_t j = 0; j < d; ++j) stats[c].mean[j] /= static_cast<double>(counts[c]);

    std::vector<double> diff(d);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = labels[i];
        if (counts[c] < 2) continue;  // singleton class keeps a zero matrix
        auto row = features.row(i);
        for (std::size_t j = 0; j < d; ++j) diff[j] = row[j] - stats[c].mean[j];
        auto& cov = stats[c].cov;
        if (opts.diagonal_only) {
            for (std::size_t j = 0; j < d; ++j) cov(j, j) += diff[j] * diff[j];
        } else {
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = j; k < d; ++k) cov(j, k) += diff[j] * diff[k];
        }
    }
    for (int c = 0; c < num_classes; ++c) {
        auto& cov = stats[c].cov;
        if (counts[c] >= 2) {
            const double denom = static_cast<double>(counts[c] - 1);
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = j; k < d; ++k) {
                    cov(j, k) /= denom;
                    cov(k, j) = cov(j, k);
                }
        }
        double trace = 0.0;
        for (std::size_t j = 0; j < d; ++j) trace += cov(j, j);
        double eps = trace > 0.0 ? opts.shrinkage_scale * trace / static_cast<double>(d)
                                 : opts.shrinkage_scale;
        cov.add_diagonal(eps);
    }
    return stats;
}

std::vector<ClassStats> estimate_class_stats(const Dataset& data, const ClassStatsOptions& opts) {
    return estimate_class_stats(data.features, data.labels, opts);
}

}  // namespace imblab
