#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imblab/matrix.hpp"
#include "imblab/stats.hpp"

namespace imblab {

/// Hyper-parameter state of the unified perturbation loss. GlobalLambda
/// holds the three shared coefficients; PerPair holds 3(C-1) coefficients
/// per class, one triple for every ordered pair y != c.
struct PerturbationParams {
    enum class Mode { GlobalLambda, PerPair };

    Mode mode = Mode::GlobalLambda;
    int num_classes = 0;
    std::vector<double> lam;  // 3 values, or 3*C*(C-1) packed pair triples

    static PerturbationParams global(double l0, double l1, double l2);
    static PerturbationParams per_pair(int C, double init0 = 1.0, double init1 = 1.0,
                                       double init2 = 1.0);

    /// Coefficient of term `t` (0 proportion, 1 variance, 2 distance) for
    /// the ordered pair (y, c), y != c.
    double coef(int y, int c, int t) const;
    /// Flat storage index for the PerPair mode.
    std::size_t pair_index(int y, int c, int t) const;

    std::size_t size() const { return lam.size(); }
    bool finite() const;
};

/// Snapshot of everything the perturbation terms read: class statistics in
/// the model's feature space, classifier head rows, and the derived
/// pairwise terms. Rebuilt whenever weights or statistics change; `version`
/// lets consumers detect staleness.
struct PerturbationContext {
    std::vector<ClassStats> stats;
    DenseMatrix head_weights;  // C x feature_dim, rows w_c

    DenseMatrix pi_term;    // log(pi_y / pi_c)
    DenseMatrix quad;       // dw' Sigma_y dw with dw = w_y - w_c (ISDA margin)
    DenseMatrix normsq;     // |dw|^2
    DenseMatrix var_term;   // quad / normsq, 0 when dw = 0 (NISDA margin)
    DenseMatrix dist_term;  // log(mean_dist / dist_yc), clamped to [-20, 20]
    std::uint64_t version = 0;

    static PerturbationContext build(const std::vector<ClassStats>& stats,
                                     const DenseMatrix& head_weights, std::uint64_t version = 0);
    int num_classes() const { return static_cast<int>(stats.size()); }
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad_logits;  // softmax(z + delta) - onehot(y)
};

/// Perturbed softmax cross-entropy on one sample: the target class's
/// delta row is added to the logits before the usual stable log-softmax.
LossGrad perturbed_ce(std::span<const double> logits, int label, std::span<const double> delta_row);

/// Logit-adjustment perturbation: every row carries lambda * log(pi_c) per
/// column (target included), so positive lambda widens tail-class margins.
DenseMatrix la_delta(std::span<const double> proportions, double lambda);

/// Mapped-variance margin on non-target entries (the implicit-augmentation
/// loss); zero on targets.
DenseMatrix isda_delta(const PerturbationContext& ctx, double lambda);

/// Projected-variance margin (mapped variance divided by |dw|^2); invariant
/// under scaling of the classifier weights. Zero where dw vanishes.
DenseMatrix nisda_delta(const PerturbationContext& ctx, double lambda);

/// Unified three-term perturbation: proportion + variance + distance, with
/// coefficients from `omega`. Zero on target entries.
DenseMatrix metalad_delta(const PerturbationContext& ctx, const PerturbationParams& omega);

/// d(mean batch loss)/d(omega). Each component is the softmax probability
/// of the competitor class times that coefficient's multiplier term,
/// averaged over the batch. `logits` is n x C, one row per sample.
std::vector<double> loss_gradients_wrt_omega(const DenseMatrix& logits,
                                             const std::vector<int>& labels,
                                             const PerturbationContext& ctx,
                                             const PerturbationParams& omega);

}  // namespace imblab
