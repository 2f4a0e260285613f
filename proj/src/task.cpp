#include "imblab/task.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace imblab {
namespace {

void add_outer(DenseMatrix& cov, std::span<const double> v, double w) {
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) cov(i, j) += w * v[i] * v[j];
}

std::vector<double> constant_vec(std::size_t d, double v) { return std::vector<double>(d, v); }

}  // namespace

GaussianTaskSpec GaussianTaskSpec::binary_variance(std::size_t d, double eta, double sigma,
                                                   double K) {
    GaussianTaskSpec s;
    s.variant = TaskVariant::BinaryVariance;
    s.d = d; s.eta = eta; s.sigma = sigma; s.K = K; s.C = 2;
    s.validate();
    return s;
}

GaussianTaskSpec GaussianTaskSpec::three_class(std::size_t d, double eta, double sigma) {
    GaussianTaskSpec s;
    s.variant = TaskVariant::ThreeClassDistance;
    s.d = d; s.eta = eta; s.sigma = sigma; s.C = 3;
    s.validate();
    return s;
}

GaussianTaskSpec GaussianTaskSpec::feature_noise(std::size_t d, double eta, double sigma,
                                                 double eps1, double eps2) {
    GaussianTaskSpec s;
    s.variant = TaskVariant::FeatureNoise;
    s.d = d; s.eta = eta; s.sigma = sigma; s.eps1 = eps1; s.eps2 = eps2; s.C = 2;
    s.validate();
    return s;
}

GaussianTaskSpec GaussianTaskSpec::mixed_prop_var(std::size_t d, double eta, double sigma,
                                                  double K, double V) {
    GaussianTaskSpec s;
    s.variant = TaskVariant::MixedPropVar;
    s.d = d; s.eta = eta; s.sigma = sigma; s.K = K; s.V = V; s.C = 2;
    s.validate();
    return s;
}

GaussianTaskSpec GaussianTaskSpec::local_two_cluster(double sigma, double alpha) {
    GaussianTaskSpec s;
    s.variant = TaskVariant::LocalTwoCluster;
    s.d = 2; s.sigma = sigma; s.alpha = alpha; s.C = 2;
    s.validate();
    return s;
}

GaussianTaskSpec GaussianTaskSpec::long_tail(int C, std::size_t d, double eta, double sigma,
                                             double imbalance_ratio) {
    GaussianTaskSpec s;
    s.variant = TaskVariant::LongTailMulticlass;
    s.d = d; s.eta = eta; s.sigma = sigma; s.C = C; s.imbalance_ratio = imbalance_ratio;
    s.validate();
    return s;
}

int GaussianTaskSpec::num_classes() const {
    switch (variant) {
        case TaskVariant::ThreeClassDistance: return 3;
        case TaskVariant::LongTailMulticlass: return C;
        default: return 2;
    }
}

void GaussianTaskSpec::validate() const {
    if (d < 1) throw std::invalid_argument("task spec: d must be >= 1");
    if (sigma <= 0.0) throw std::invalid_argument("task spec: sigma must be > 0");
    switch (variant) {
        case TaskVariant::BinaryVariance:
            if (eta <= 0.0) throw std::invalid_argument("task spec: eta must be > 0");
            if (K < 1.0) throw std::invalid_argument("task spec: K must be >= 1");
            break;
        case TaskVariant::ThreeClassDistance:
            if (eta <= 0.0) throw std::invalid_argument("task spec: eta must be > 0");
            break;
        case TaskVariant::FeatureNoise:
            if (eta <= 0.0) throw std::invalid_argument("task spec: eta must be > 0");
            if (eps1 < 0.0 || eps2 < 0.0)
                throw std::invalid_argument("task spec: noise stds must be >= 0");
            break;
        case TaskVariant::MixedPropVar:
            if (eta <= 0.0) throw std::invalid_argument("task spec: eta must be > 0");
            if (K < 1.0) throw std::invalid_argument("task spec: K must be >= 1");
            if (V < 1.0) throw std::invalid_argument("task spec: V must be >= 1");
            break;
        case TaskVariant::LocalTwoCluster:
            if (d != 2) throw std::invalid_argument("task spec: LocalTwoCluster is 2-D");
            if (alpha <= 0.0 || alpha >= 1.0)
                throw std::invalid_argument("task spec: alpha must be in (0,1)");
            break;
        case TaskVariant::LongTailMulticlass:
            if (eta <= 0.0) throw std::invalid_argument("task spec: eta must be > 0");
            if (C < 2) throw std::invalid_argument("task spec: C must be >= 2");
            if (imbalance_ratio < 1.0)
                throw std::invalid_argument("task spec: imbalance_ratio must be >= 1");
            if (d + 1 < static_cast<std::size_t>(C))
                throw std::invalid_argument("task spec: long tail needs d >= C-1 for simplex centers");
            if (!sigma_scales.empty() && sigma_scales.size() != static_cast<std::size_t>(C))
                throw std::invalid_argument("task spec: sigma_scales size must equal C");
            break;
    }
}

std::string GaussianTaskSpec::variant_name() const {
    switch (variant) {
        case TaskVariant::BinaryVariance: return "binary_variance";
        case TaskVariant::ThreeClassDistance: return "three_class_distance";
        case TaskVariant::FeatureNoise: return "feature_noise";
        case TaskVariant::MixedPropVar: return "mixed_prop_var";
        case TaskVariant::LocalTwoCluster: return "local_two_cluster";
        case TaskVariant::LongTailMulticlass: return "long_tail_multiclass";
    }
    return "unknown";
}

namespace {

// Class proportions of the generative model.
std::vector<double> class_priors(const GaussianTaskSpec& spec) {
    switch (spec.variant) {
        case TaskVariant::MixedPropVar: {
            double denom = 1.0 + spec.V;
            return {1.0 / denom, spec.V / denom};
        }
        case TaskVariant::LongTailMulticlass: {
            // geometric profile with pi_first / pi_last = imbalance_ratio
            std::vector<double> pi(spec.C);
            double total = 0.0;
            for (int c = 0; c < spec.C; ++c) {
                double expo = spec.C == 1 ? 0.0 : static_cast<double>(c) / (spec.C - 1);
                pi[c] = std::pow(spec.imbalance_ratio, -expo);
                total += pi[c];
            }
            for (double& p : pi) p /= total;
            return pi;
        }
        default:
            return std::vector<double>(spec.num_classes(), 1.0 / spec.num_classes());
    }
}

// Per-class standard deviation (spherical covariance scale).
double class_sigma(const GaussianTaskSpec& spec, int c) {
    switch (spec.variant) {
        case TaskVariant::BinaryVariance:
            return c == 0 ? spec.K * spec.sigma : spec.sigma;
        case TaskVariant::FeatureNoise:
            return c == 0 ? std::sqrt(spec.sigma * spec.sigma + spec.eps1 * spec.eps1)
                          : std::sqrt(spec.sigma * spec.sigma + spec.eps2 * spec.eps2);
        case TaskVariant::MixedPropVar:
            return c == 0 ? spec.sigma : spec.K * spec.sigma;
        case TaskVariant::LongTailMulticlass:
            return spec.sigma_scales.empty() ? spec.sigma : spec.sigma * spec.sigma_scales[c];
        default:
            return spec.sigma;
    }
}

// LocalTwoCluster sub-cluster centers for the split class.
constexpr double kLocalNear[2] = {1.0, 1.0};
constexpr double kLocalFar[2] = {3.0, 3.0};
constexpr double kLocalOther[2] = {-4.0, -4.0};

void sample_spherical(std::span<double> out, std::span<const double> center, double sd,
                      RngStream& rng) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = center[j] + sd * rng.next_normal();
}

}  // namespace

DenseMatrix class_centers(const GaussianTaskSpec& spec) {
    spec.validate();
    const std::size_t d = spec.d;
    switch (spec.variant) {
        case TaskVariant::BinaryVariance:
        case TaskVariant::FeatureNoise:
        case TaskVariant::MixedPropVar: {
            DenseMatrix m(2, d);
            for (std::size_t j = 0; j < d; ++j) {
                m(0, j) = spec.eta;
                m(1, j) = -spec.eta;
            }
            return m;
        }
        case TaskVariant::ThreeClassDistance: {
            DenseMatrix m(3, d);
            for (std::size_t j = 0; j < d; ++j) {
                m(0, j) = spec.eta;
                m(1, j) = 0.0;
                m(2, j) = -spec.eta;
            }
            return m;
        }
        case TaskVariant::LocalTwoCluster: {
            // mixture mean for the split class
            DenseMatrix m(2, 2);
            m(0, 0) = kLocalOther[0];
            m(0, 1) = kLocalOther[1];
            for (int j = 0; j < 2; ++j)
                m(1, j) = spec.alpha * kLocalNear[j] + (1.0 - spec.alpha) * kLocalFar[j];
            return m;
        }
        case TaskVariant::LongTailMulticlass: {
            // Regular simplex vertices via the Helmert basis: coordinates of
            // e_c in the orthonormal complement of the all-ones direction,
            // rescaled so each center has norm eta*sqrt(d).
            const int C = spec.C;
            DenseMatrix m(C, d);
            double scale = spec.eta * std::sqrt(static_cast<double>(d)) /
                           std::sqrt(1.0 - 1.0 / static_cast<double>(C));
            for (int c = 0; c < C; ++c) {
                for (int k = 1; k < C; ++k) {
                    // Helmert row k has k entries 1/sqrt(k(k+1)) then -k/sqrt(k(k+1))
                    double denom = std::sqrt(static_cast<double>(k) * (k + 1));
                    double coord = 0.0;
                    if (c < k) coord = 1.0 / denom;
                    else if (c == k) coord = -static_cast<double>(k) / denom;
                    m(c, k - 1) = scale * coord;
                }
            }
            return m;
        }
    }
    throw std::logic_error("class_centers: unreachable");
}

Dataset generate(const GaussianTaskSpec& spec, std::size_t count, RngStream& rng,
                 SampleMode mode) {
    spec.validate();
    if (count < 1) throw std::invalid_argument("generate: count must be >= 1");
    const int C = spec.num_classes();
    const std::size_t d = spec.d;
    const DenseMatrix centers = class_centers(spec);
    const std::vector<double> priors = class_priors(spec);

    // resolve per-sample labels
    std::vector<int> labels;
    if (mode == SampleMode::PerClass) {
        labels.reserve(count * C);
        for (int c = 0; c < C; ++c) labels.insert(labels.end(), count, c);
    } else {
        labels.reserve(count);
        std::vector<double> cdf(priors);
        for (int c = 1; c < C; ++c) cdf[c] += cdf[c - 1];
        for (std::size_t i = 0; i < count; ++i) {
            double u = rng.next_uniform();
            int c = 0;
            while (c + 1 < C && u > cdf[c]) ++c;
            labels.push_back(c);
        }
        std::vector<std::size_t> seen(C, 0);
        for (int l : labels) ++seen[l];
        for (int c = 0; c < C; ++c)
            if (seen[c] == 0)
                throw std::runtime_error("generate: class " + std::to_string(c) +
                                         " received zero samples; increase count");
    }

    Dataset ds;
    ds.labels = std::move(labels);
    ds.features = DenseMatrix(ds.labels.size(), d);
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        const int c = ds.labels[i];
        auto row = ds.features.row(i);
        if (spec.variant == TaskVariant::LocalTwoCluster && c == 1) {
            bool near = rng.next_uniform() < spec.alpha;
            sample_spherical(row, near ? kLocalNear : kLocalFar, spec.sigma, rng);
        } else {
            sample_spherical(row, centers.row(c), class_sigma(spec, c), rng);
        }
    }
    return ds;
}

std::vector<ClassStats> true_stats(const GaussianTaskSpec& spec) {
    spec.validate();
    const int C = spec.num_classes();
    const std::size_t d = spec.d;
    const DenseMatrix centers = class_centers(spec);
    const std::vector<double> priors = class_priors(spec);

    std::vector<ClassStats> stats(C);
    for (int c = 0; c < C; ++c) {
        stats[c].proportion = priors[c];
        auto row = centers.row(c);
        stats[c].mean.assign(row.begin(), row.end());
        double sd = class_sigma(spec, c);
        stats[c].cov = DenseMatrix::identity(d, sd * sd);
    }
    if (spec.variant == TaskVariant::LocalTwoCluster) {
        // mixture covariance: sigma^2 I + sum_k w_k (c_k - m)(c_k - m)^T
        auto& s = stats[1];
        std::vector<double> d1 = subtract(std::span<const double>(kLocalNear, 2), s.mean);
        std::vector<double> d2 = subtract(std::span<const double>(kLocalFar, 2), s.mean);
        add_outer(s.cov, d1, spec.alpha);
        add_outer(s.cov, d2, 1.0 - spec.alpha);
    }
    return stats;
}

Dataset toy_graph(std::size_t n_per_class, int C, const std::vector<double>& heterophily,
                  RngStream& rng, double target_cross_degree) {
    if (n_per_class < 1) throw std::invalid_argument("toy_graph: n_per_class must be >= 1");
    if (C < 2) throw std::invalid_argument("toy_graph: C must be >= 2");
    if (heterophily.size() != static_cast<std::size_t>(C))
        throw std::invalid_argument("toy_graph: heterophily size must equal C");
    for (double h : heterophily)
        if (h < 0.0 || h > 1.0)
            throw std::invalid_argument("toy_graph: heterophily values must lie in [0,1]");

    const double n = static_cast<double>(n_per_class);
    int active = 0;
    for (double h : heterophily)
        if (h > 0.0) ++active;
    if (active == 1)
        throw std::invalid_argument("toy_graph: a single class cannot have cross-class edges");

    // Within the active set every class gets the same expected cross-class
    // degree T; the same-class edge probability is then set per class so the
    // expected heterophilous fraction equals heterophily[c].
    const double T = target_cross_degree;
    std::vector<double> q_same(C), q_cross_share(C, 0.0);
    double q_cross = active > 1 ? T / ((active - 1) * n) : 0.0;
    for (int c = 0; c < C; ++c) {
        double h = heterophily[c];
        double same_degree;
        if (h <= 0.0) same_degree = T;                       // homophilous default degree
        else if (h >= 1.0) same_degree = 0.0;
        else same_degree = T * (1.0 - h) / h;
        q_same[c] = n_per_class > 1 ? same_degree / (n - 1.0) : 0.0;
        if (q_same[c] > 1.0)
            throw std::invalid_argument("toy_graph: n_per_class too small for requested heterophily");
        q_cross_share[c] = h > 0.0 ? q_cross : 0.0;
    }
    if (q_cross > 1.0)
        throw std::invalid_argument("toy_graph: n_per_class too small for target cross degree");

    const std::size_t total = n_per_class * static_cast<std::size_t>(C);
    Dataset ds;
    ds.labels.reserve(total);
    for (int c = 0; c < C; ++c) ds.labels.insert(ds.labels.end(), n_per_class, c);
    ds.features = DenseMatrix(total, 1);
    for (std::size_t i = 0; i < total; ++i) ds.features(i, 0) = static_cast<double>(ds.labels[i]);

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = i + 1; j < total; ++j) {
            int ci = ds.labels[i], cj = ds.labels[j];
            double p = ci == cj ? q_same[ci]
                                : (q_cross_share[ci] > 0.0 && q_cross_share[cj] > 0.0 ? q_cross : 0.0);
            if (p > 0.0 && rng.next_uniform() < p) edges.emplace_back(static_cast<int>(i),
                                                                      static_cast<int>(j));
        }
    }
    ds.adjacency = std::move(edges);
    return ds;
}

Dataset figure_graph_fixture() {
    // nodes 0..2 red, 3..5 blue, 6..8 green
    Dataset ds;
    ds.labels = {0, 0, 0, 1, 1, 1, 2, 2, 2};
    ds.features = DenseMatrix(9, 1);
    for (std::size_t i = 0; i < 9; ++i) ds.features(i, 0) = static_cast<double>(ds.labels[i]);
    ds.adjacency = std::vector<Edge>{
        {0, 1}, {0, 2}, {1, 2},  // red triangle
        {0, 3},                  // red1 - blue1
        {0, 6},                  // red1 - green1
        {1, 7},                  // red2 - green2
        {2, 8},                  // red3 - green3
        {4, 7},                  // blue2 - green2
        {5, 5},                  // blue3 self-loop keeps one same-class neighbor
        {5, 8},                  // blue3 - green3
    };
    return ds;
}

}  // namespace imblab
