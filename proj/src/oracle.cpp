#include "imblab/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "imblab/normal.hpp"

namespace imblab {

int LinearClassifier::predict(std::span<const double> x) const {
    double s = dot(w, x);
    int c = 0;
    for (double cut : cuts) {
        if (s > cut) break;
        ++c;
    }
    return c;
}

double minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                       int grid_points, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: empty bracket");
    // coarse scan to isolate the global minimum
    double best_x = lo, best_f = f(lo);
    const double step = (hi - lo) / (grid_points - 1);
    for (int i = 1; i < grid_points; ++i) {
        double x = lo + i * step;
        double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - 2.0 * step);
    double b = std::min(hi, best_x + 2.0 * step);

    // golden-section refinement
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

namespace {

std::vector<double> ones(std::size_t d) { return std::vector<double>(d, 1.0); }

double pairwise_gap(const std::vector<double>& errors) {
    double g = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i)
        for (std::size_t j = i + 1; j < errors.size(); ++j)
            g = std::max(g, std::abs(errors[i] - errors[j]));
    return g;
}

}  // namespace

OracleResult optimal_binary_variance(const GaussianTaskSpec& spec) {
    if (spec.variant != TaskVariant::BinaryVariance)
        throw std::invalid_argument("optimal_binary_variance: wrong task variant");
    spec.validate();
    const double d = static_cast<double>(spec.d);
    const double m = d * spec.eta;                       // projected mean magnitude
    const double s_plus = std::sqrt(d) * spec.K * spec.sigma;
    const double s_minus = std::sqrt(d) * spec.sigma;

    // class 0 ("+1") predicted when 1.x + b > 0
    auto err_plus = [&](double b) { return std_normal_cdf((-b - m) / s_plus); };
    auto err_minus = [&](double b) { return std_normal_cdf((b - m) / s_minus); };
    auto objective = [&](double b) { return 0.5 * (err_plus(b) + err_minus(b)); };

    const double bracket = 10.0 * m;
    double b = minimize_scalar(objective, -bracket, bracket);

    OracleResult res;
    res.classifier.w = ones(spec.d);
    res.classifier.cuts = {-b};
    res.per_class_error = {err_plus(b), err_minus(b)};
    res.gap = pairwise_gap(res.per_class_error);
    res.intermediates["b"] = b;
    res.intermediates["mean_error"] = objective(b);
    return res;
}

OracleResult bayes_three_class(const GaussianTaskSpec& spec) {
    if (spec.variant != TaskVariant::ThreeClassDistance)
        throw std::invalid_argument("bayes_three_class: wrong task variant");
    spec.validate();
    const double d = static_cast<double>(spec.d);
    const double cut = d * spec.eta / 2.0;

    // Exact error of this rule: each boundary sits d*eta/2 away from the
    // adjacent projected class mean, i.e. sqrt(d)*eta/(2*sigma) standard
    // units. The outer classes cross one boundary, the middle one two.
    const double z = std::sqrt(d) * spec.eta / (2.0 * spec.sigma);
    const double deficit = std_normal_cdf(-z);
    const double z_printed = 3.0 * z;
    const double deficit_printed = std_normal_cdf(-z_printed);

    OracleResult res;
    res.classifier.w = ones(spec.d);
    res.classifier.cuts = {cut, -cut};
    res.per_class_error = {deficit, 2.0 * deficit, deficit};
    res.gap = pairwise_gap(res.per_class_error);
    res.intermediates["deficit"] = deficit;
    res.intermediates["phi_argument"] = -z;
    res.intermediates["acc0_as_printed"] = 1.0 - deficit_printed;
    res.intermediates["acc1_as_printed"] = 1.0 - 2.0 * deficit_printed;
    res.intermediates["acc2_as_printed"] = 1.0 - deficit_printed;
    res.note =
        "published accuracy expression uses 3*sqrt(d)*eta/(2*sigma); the exact error of the "
        "returned rule (confirmed by Monte Carlo) uses factor 1, kept in per_class_error";
    return res;
}

double mixed_weighted_error(const GaussianTaskSpec& spec, double b) {
    const double d = static_cast<double>(spec.d);
    const double m = d * spec.eta;
    const double sd = std::sqrt(d) * spec.sigma;
    // class -1 error weighted by V, class +1 by 1 (unnormalized priors)
    return spec.V * std_normal_cdf((b - m) / (spec.K * sd)) + std_normal_cdf((-b - m) / sd);
}

MixedClosedForm mixed_closed_form(const GaussianTaskSpec& spec) {
    if (spec.variant != TaskVariant::MixedPropVar)
        throw std::invalid_argument("mixed_closed_form: wrong task variant");
    spec.validate();
    const double d = static_cast<double>(spec.d);
    const double K = spec.K, V = spec.V;
    const double eta = spec.eta, sigma = spec.sigma;
    const double sd = std::sqrt(d) * sigma;

    MixedClosedForm out;
    if (K == 1.0) {
        // Proportion-only limit: equate V-weighted class densities of the
        // 1-D statistic; the K^2-1 denominators cancel.
        out.proportion_only = true;
        out.b = -sigma * sigma * std::log(V) / (2.0 * eta);
        out.err_plus = std_normal_cdf((-out.b - d * eta) / sd);
        out.err_minus = std_normal_cdf((out.b - d * eta) / sd);
        return out;
    }

    const double k2m1 = K * K - 1.0;
    // Stationary point of the weighted error. The square-root term carries
    // the same 1/(K^2-1) factor as the leading term; dropping it (as the
    // printed closed form does) contradicts the error expressions below,
    // which Monte Carlo confirms.
    const double disc = 4.0 * d * d * eta * eta + 2.0 * d * k2m1 * sigma * sigma * std::log(K / V);
    if (disc < 0.0)
        throw std::domain_error(
            "mixed_closed_form: weighted error has no interior optimum for these parameters "
            "(the optimal linear rule degenerates to the majority class)");
    out.b = -d * eta * (K * K + 1.0) / k2m1 + K / k2m1 * std::sqrt(disc);

    out.B = -2.0 * d * eta / (sd * k2m1);
    out.q = 2.0 * std::log(K / V) / k2m1;
    const double root = std::sqrt(out.B * out.B + out.q);
    out.err_plus = std_normal_cdf(-K * root - out.B);
    out.err_minus = std_normal_cdf(K * out.B + root);
    return out;
}

OracleResult optimal_mixed(const GaussianTaskSpec& spec) {
    MixedClosedForm cf = mixed_closed_form(spec);

    const double d = static_cast<double>(spec.d);
    const double m = d * spec.eta;
    const double sd = std::sqrt(d) * spec.sigma;
    const double bracket = 10.0 * m;
    double b_num = minimize_scalar([&](double b) { return mixed_weighted_error(spec, b); },
                                   -bracket, bracket);

    OracleResult res;
    res.classifier.w = ones(spec.d);
    res.classifier.cuts = {-cf.b};
    res.per_class_error = {cf.err_plus, cf.err_minus};
    res.gap = pairwise_gap(res.per_class_error);
    res.intermediates["b_closed"] = cf.b;
    res.intermediates["b_numeric"] = b_num;
    res.intermediates["err_plus_numeric"] = std_normal_cdf((-b_num - m) / sd);
    res.intermediates["err_minus_numeric"] = std_normal_cdf((b_num - m) / (spec.K * sd));
    res.intermediates["B"] = cf.B;
    res.intermediates["q"] = cf.q;
    res.intermediates["weighted_error"] = mixed_weighted_error(spec, cf.b);
    if (cf.proportion_only) res.note = "K = 1: proportion-only closed form";
    return res;
}

GapGrid corollary_grid(const std::vector<double>& Ks, const std::vector<double>& Vs,
                       const GaussianTaskSpec& base) {
    if (Ks.empty() || Vs.empty()) throw std::invalid_argument("corollary_grid: empty grid");
    GapGrid grid;
    grid.Ks = Ks;
    grid.Vs = Vs;
    grid.gaps = DenseMatrix(Ks.size(), Vs.size());
    for (std::size_t i = 0; i < Ks.size(); ++i)
        for (std::size_t j = 0; j < Vs.size(); ++j) {
            GaussianTaskSpec spec =
                GaussianTaskSpec::mixed_prop_var(base.d, base.eta, base.sigma, Ks[i], Vs[j]);
            MixedClosedForm cf = mixed_closed_form(spec);
            grid.gaps(i, j) = std::abs(cf.err_plus - cf.err_minus);
        }
    return grid;
}

std::vector<LocalGapResult> local_gap(const GaussianTaskSpec& spec,
                                      const std::vector<double>& alphas) {
    if (spec.variant != TaskVariant::LocalTwoCluster)
        throw std::invalid_argument("local_gap: wrong task variant");
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    // projections of the three centers onto the diagonal unit direction
    const double m_other = -8.0 * inv_sqrt2;
    const double m_near = 2.0 * inv_sqrt2;
    const double m_far = 6.0 * inv_sqrt2;
    const double s = spec.sigma;

    std::vector<LocalGapResult> out;
    out.reserve(alphas.size());
    for (double alpha : alphas) {
        if (alpha <= 0.0 || alpha >= 1.0)
            throw std::invalid_argument("local_gap: alpha must be in (0,1)");
        auto objective = [&](double t) {
            double err0 = 1.0 - std_normal_cdf((t - m_other) / s);
            double err1 = alpha * std_normal_cdf((t - m_near) / s) +
                          (1.0 - alpha) * std_normal_cdf((t - m_far) / s);
            return 0.5 * (err0 + err1);
        };
        double span = (m_far - m_other) + 10.0 * s;
        double t = minimize_scalar(objective, m_other - span, m_far + span);

        LocalGapResult r;
        r.alpha = alpha;
        r.threshold = t;
        r.err_near = std_normal_cdf((t - m_near) / s);
        r.err_far = std_normal_cdf((t - m_far) / s);
        r.gap = std::abs(r.err_near - r.err_far);
        out.push_back(r);
    }
    return out;
}

std::vector<double> monte_carlo_error(const LinearClassifier& clf, const GaussianTaskSpec& spec,
                                      std::size_t count_per_class, RngStream& rng) {
    spec.validate();
    if (count_per_class < 1) throw std::invalid_argument("monte_carlo_error: count must be >= 1");
    Dataset ds = generate(spec, count_per_class, rng, SampleMode::PerClass);
    const int C = spec.num_classes();
    std::vector<std::size_t> wrong(C, 0), seen(C, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        int y = ds.labels[i];
        ++seen[y];
        if (clf.predict(ds.features.row(i)) != y) ++wrong[y];
    }
    std::vector<double> err(C);
    for (int c = 0; c < C; ++c) err[c] = static_cast<double>(wrong[c]) / static_cast<double>(seen[c]);
    return err;
}

}  // namespace imblab
