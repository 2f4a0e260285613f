#include "imblab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "imblab/metrics.hpp"

namespace imblab {

PerturbationParams PerturbationParams::global(double l0, double l1, double l2) {
    PerturbationParams p;
    p.mode = Mode::GlobalLambda;
    p.lam = {l0, l1, l2};
    return p;
}

PerturbationParams PerturbationParams::per_pair(int C, double init0, double init1, double init2) {
    if (C < 2) throw std::invalid_argument("PerturbationParams: C must be >= 2");
    PerturbationParams p;
    p.mode = Mode::PerPair;
    p.num_classes = C;
    p.lam.resize(3 * static_cast<std::size_t>(C) * (C - 1));
    for (std::size_t i = 0; i < p.lam.size(); i += 3) {
        p.lam[i] = init0;
        p.lam[i + 1] = init1;
        p.lam[i + 2] = init2;
    }
    return p;
}

std::size_t PerturbationParams::pair_index(int y, int c, int t) const {
    const int C = num_classes;
    std::size_t pair = static_cast<std::size_t>(y) * (C - 1) + (c < y ? c : c - 1);
    return 3 * pair + static_cast<std::size_t>(t);
}

double PerturbationParams::coef(int y, int c, int t) const {
    if (mode == Mode::GlobalLambda) return lam[t];
    return lam[pair_index(y, c, t)];
}

bool PerturbationParams::finite() const {
    for (double v : lam)
        if (!std::isfinite(v)) return false;
    return true;
}

PerturbationContext PerturbationContext::build(const std::vector<ClassStats>& stats,
                                               const DenseMatrix& head_weights,
                                               std::uint64_t version) {
    const int C = static_cast<int>(stats.size());
    if (C < 2) throw std::invalid_argument("PerturbationContext: need at least two classes");
    if (head_weights.rows() != static_cast<std::size_t>(C))
        throw std::invalid_argument("PerturbationContext: head row count != class count");

    PerturbationContext ctx;
    ctx.stats = stats;
    ctx.head_weights = head_weights;
    ctx.version = version;
    ctx.pi_term = DenseMatrix(C, C);
    ctx.quad = DenseMatrix(C, C);
    ctx.normsq = DenseMatrix(C, C);
    ctx.var_term = DenseMatrix(C, C);
    ctx.dist_term = DenseMatrix(C, C);

    const std::size_t d = stats[0].mean.size();
    DenseMatrix centers(C, d);
    for (int c = 0; c < C; ++c)
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = stats[c].mean[j];
    DistanceStats dist = distance_stats(centers);

    for (int y = 0; y < C; ++y)
        for (int c = 0; c < C; ++c) {
            if (y == c) continue;
            ctx.pi_term(y, c) = std::log(stats[y].proportion / stats[c].proportion);
            auto dw = subtract(head_weights.row(y), head_weights.row(c));
            double n2 = dot(dw, dw);
            ctx.normsq(y, c) = n2;
            double q = quadratic_form(stats[y].cov, dw);
            ctx.quad(y, c) = q;
            ctx.var_term(y, c) = n2 > 0.0 ? q / n2 : 0.0;

            // coincident centers appear transiently during training; the log
            // ratio is clamped rather than allowed to blow up
            double dyc = dist.delta(y, c);
            double term;
            if (dyc <= 0.0)
                term = dist.mean_distance <= 0.0 ? 0.0 : 20.0;
            else
                term = std::clamp(std::log(dist.mean_distance / dyc), -20.0, 20.0);
            ctx.dist_term(y, c) = term;
        }
    return ctx;
}

LossGrad perturbed_ce(std::span<const double> logits, int label,
                      std::span<const double> delta_row) {
    const std::size_t C = logits.size();
    if (delta_row.size() != C) throw std::invalid_argument("perturbed_ce: delta size mismatch");
    if (label < 0 || static_cast<std::size_t>(label) >= C)
        throw std::invalid_argument("perturbed_ce: label out of range");

    LossGrad out;
    out.grad_logits.resize(C);
    double mx = logits[0] + delta_row[0];
    for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, logits[c] + delta_row[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        out.grad_logits[c] = std::exp(logits[c] + delta_row[c] - mx);
        sum += out.grad_logits[c];
    }
    for (std::size_t c = 0; c < C; ++c) out.grad_logits[c] /= sum;
    out.loss = std::log(sum) + mx - (logits[label] + delta_row[label]);
    out.grad_logits[label] -= 1.0;
    return out;
}

DenseMatrix la_delta(std::span<const double> proportions, double lambda) {
    const std::size_t C = proportions.size();
    DenseMatrix delta(C, C);
    for (std::size_t c = 0; c < C; ++c) {
        if (proportions[c] <= 0.0) throw std::invalid_argument("la_delta: non-positive proportion");
        double v = lambda * std::log(proportions[c]);
        for (std::size_t y = 0; y < C; ++y) delta(y, c) = v;
    }
    return delta;
}

DenseMatrix isda_delta(const PerturbationContext& ctx, double lambda) {
    const int C = ctx.num_classes();
    DenseMatrix delta(C, C);
    for (int y = 0; y < C; ++y)
        for (int c = 0; c < C; ++c)
            if (y != c) delta(y, c) = lambda * ctx.quad(y, c);
    return delta;
}

DenseMatrix nisda_delta(const PerturbationContext& ctx, double lambda) {
    const int C = ctx.num_classes();
    DenseMatrix delta(C, C);
    for (int y = 0; y < C; ++y)
        for (int c = 0; c < C; ++c)
            if (y != c) delta(y, c) = lambda * ctx.var_term(y, c);
    return delta;
}

DenseMatrix metalad_delta(const PerturbationContext& ctx, const PerturbationParams& omega) {
    const int C = ctx.num_classes();
    if (omega.mode == PerturbationParams::Mode::PerPair && omega.num_classes != C)
        throw std::invalid_argument("metalad_delta: omega class count mismatch");
    DenseMatrix delta(C, C);
    for (int y = 0; y < C; ++y)
        for (int c = 0; c < C; ++c) {
            if (y == c) continue;
            delta(y, c) = omega.coef(y, c, 0) * ctx.pi_term(y, c) +
                          omega.coef(y, c, 1) * ctx.var_term(y, c) +
                          omega.coef(y, c, 2) * ctx.dist_term(y, c);
        }
    return delta;
}

std::vector<double> loss_gradients_wrt_omega(const DenseMatrix& logits,
                                             const std::vector<int>& labels,
                                             const PerturbationContext& ctx,
                                             const PerturbationParams& omega) {
    const int C = ctx.num_classes();
    const std::size_t n = labels.size();
    if (logits.rows() != n || logits.cols() != static_cast<std::size_t>(C))
        throw std::invalid_argument("loss_gradients_wrt_omega: logits shape mismatch");

    DenseMatrix delta = metalad_delta(ctx, omega);
    std::vector<double> grad(omega.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        LossGrad lg = perturbed_ce(logits.row(i), y, delta.row(y));
        // p_c = grad_logits[c] for c != y (the one-hot subtraction only
        // touches the target entry, which carries no omega coefficient)
        for (int c = 0; c < C; ++c) {
            if (c == y) continue;
            double p = lg.grad_logits[c];
            double terms[3] = {ctx.pi_term(y, c), ctx.var_term(y, c), ctx.dist_term(y, c)};
            for (int t = 0; t < 3; ++t) {
                double g = p * terms[t] / static_cast<double>(n);
                if (omega.mode == PerturbationParams::Mode::GlobalLambda)
                    grad[t] += g;
                else
                    grad[omega.pair_index(y, c, t)] += g;
            }
        }
    }
    return grad;
}

}  // namespace imblab
