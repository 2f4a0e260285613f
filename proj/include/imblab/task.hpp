#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imblab/dataset.hpp"
#include "imblab/rng.hpp"
#include "imblab/stats.hpp"

namespace imblab {

enum class TaskVariant {
    BinaryVariance,     // centers +/-theta, stds (K*sigma, sigma), equal priors
    ThreeClassDistance, // centers theta, 0, -theta, shared sigma, equal priors
    FeatureNoise,       // centers +/-theta, per-class extra noise eps1/eps2
    MixedPropVar,       // priors 1:V, stds (sigma, K*sigma)
    LocalTwoCluster,    // 2-D; one class split into sub-clusters at [1,1] / [3,3]
    LongTailMulticlass, // geometric class proportions, simplex centers
};

/// Tagged description of one synthetic task family. Only the fields of the
/// active variant are read; validate() enforces the per-variant constraints.
///
/// Class index convention: the paper-style binary labels {-1,+1} map to
/// {1,0} (+1 first), and multiclass labels are already 0-based.
struct GaussianTaskSpec {
    TaskVariant variant = TaskVariant::BinaryVariance;
    std::size_t d = 2;       // feature dimension
    double eta = 1.0;        // mean magnitude, theta = [eta,...,eta]
    double sigma = 1.0;      // base standard deviation
    double K = 1.0;          // std ratio between the wide and narrow class
    double V = 1.0;          // proportion ratio pi(-1) : pi(+1)
    double alpha = 0.5;      // weight of the near sub-cluster [1,1]
    double eps1 = 0.0;       // feature-noise std, class +1
    double eps2 = 0.0;       // feature-noise std, class -1
    int C = 2;               // class count (LongTailMulticlass)
    double imbalance_ratio = 1.0;       // pi_first / pi_last
    std::vector<double> sigma_scales;   // optional per-class std scale (LongTail)

    static GaussianTaskSpec binary_variance(std::size_t d, double eta, double sigma, double K);
    static GaussianTaskSpec three_class(std::size_t d, double eta, double sigma);
    static GaussianTaskSpec feature_noise(std::size_t d, double eta, double sigma, double eps1,
                                          double eps2);
    static GaussianTaskSpec mixed_prop_var(std::size_t d, double eta, double sigma, double K,
                                           double V);
    static GaussianTaskSpec local_two_cluster(double sigma, double alpha);
    static GaussianTaskSpec long_tail(int C, std::size_t d, double eta, double sigma,
                                      double imbalance_ratio);

    int num_classes() const;
    void validate() const;
    std::string variant_name() const;
};

enum class SampleMode {
    PerClass,  // count means samples per class, labels in class blocks
    Total,     // count means total samples, labels drawn iid from the priors
};

/// Draw a dataset from the task's generative model. Deterministic per rng
/// stream. In Total mode a class that ends up with zero samples is an error.
Dataset generate(const GaussianTaskSpec& spec, std::size_t count, RngStream& rng,
                 SampleMode mode = SampleMode::PerClass);

/// Exact population mean/covariance/proportion per class. For
/// LocalTwoCluster the split class carries its mixture mean and covariance.
std::vector<ClassStats> true_stats(const GaussianTaskSpec& spec);

/// Class centers only (rows of a C x d matrix), as used by true_stats.
DenseMatrix class_centers(const GaussianTaskSpec& spec);

/// Random labeled graph whose class-c nodes see a heterophily[c] fraction of
/// different-class neighbors in expectation. Features are 1-D class indices
/// (the graph itself is the object of interest).
Dataset toy_graph(std::size_t n_per_class, int C, const std::vector<double>& heterophily,
                  RngStream& rng, double target_cross_degree = 12.0);

/// Hand-encoded 3-class micro-graph with known per-node heterophily
/// fractions: red nodes {1/2, 1/3, 1/3}, blue nodes {1, 1, 1/2}.
/// Classes: 0 = red, 1 = blue, 2 = green. The 1/2-valued blue node carries a
/// self-loop; a simple graph with three 3-node classes cannot realize
/// {1, 1, 1/2} because one blue-blue edge would lower two nodes below 1.
Dataset figure_graph_fixture();

}  // namespace imblab
