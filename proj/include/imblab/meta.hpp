#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "imblab/trainer.hpp"

namespace imblab {

enum class HypergradMode { UnrolledExact, FiniteDifference };

/// Whether the meta objective applies the perturbed loss (as written) or
/// plain cross-entropy on the balanced meta batch.
enum class MetaLossMode { Perturbed, PlainCE };

struct MetaConfig {
    double eta1 = 0.1;               // inner step size (shared with the real update)
    double eta2 = 100.0;             // hyper-parameter step size
    std::size_t batch_n = 64;        // training batch
    std::size_t batch_m = 32;        // meta batch
    int T1 = 0;                      // warmup steps (plain CE)
    int T2 = 0;                      // total steps
    PerturbationParams omega_init;
    HypergradMode hypergrad = HypergradMode::UnrolledExact;
    MetaLossMode meta_loss = MetaLossMode::Perturbed;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    std::vector<int> lr_milestones;  // epochs, as in TrainConfig
    double lr_decay = 0.1;
    bool refresh_per_batch = false;
    std::uint64_t seed = 1;
    std::array<bool, 3> active_terms = {true, true, true};  // ablation mask over lambda families
    bool allow_imbalanced_meta = false;
    ClassStatsOptions stats_options;
};

struct OmegaTrajectoryPoint {
    int step = 0;
    std::vector<double> lam;
};

struct MetaResult {
    Model model;
    TrainReport report;
    PerturbationParams omega;
    std::vector<OmegaTrajectoryPoint> trajectory;
};

/// Theta_hat(Omega): one plain SGD step on the batch's perturbed loss.
/// The input model is untouched.
Model temp_update(const Model& model, const Batch& batch, const PerturbationContext& ctx,
                  const PerturbationParams& omega, double eta1);

/// Mean perturbed (or plain) CE of a model on a batch.
double batch_loss(const Model& model, const Batch& batch, const PerturbationContext& ctx,
                  const PerturbationParams& omega, MetaLossMode mode);

/// d(meta batch loss at Theta_hat(Omega)) / d(Omega): the chain through the
/// temporary update plus the direct dependence of the perturbed meta loss.
/// UnrolledExact differentiates the one-step update analytically;
/// FiniteDifference is the slow central-difference oracle.
std::vector<double> hypergradient(const Model& model, const Batch& train_batch,
                                  const Batch& meta_batch, const PerturbationContext& ctx,
                                  const PerturbationParams& omega, double eta1,
                                  HypergradMode mode, MetaLossMode meta_mode);

/// Central-difference hypergradient for a generic scalar bilevel problem:
/// d/d omega_k of meta_loss(theta - eta1 * inner_grad(theta, omega), omega).
/// Used as the test oracle for the analytic path.
std::vector<double> finite_difference_hypergradient(
    const std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)>&
        inner_grad,
    const std::function<double(const std::vector<double>&, const std::vector<double>&)>& meta_loss,
    const std::vector<double>& theta, const std::vector<double>& omega, double eta1,
    double step = 1e-5);

/// Class-balanced meta subset drawn uniformly from the training set.
Dataset make_meta_set(const Dataset& train, std::size_t per_class, RngStream& rng);

/// Warmup with plain CE to step T1, then the three-step cycle
/// (temporary update, Omega update on the meta batch, real update with the
/// fresh Omega) to step T2. The warmup phase is bit-identical to train()
/// with the same seed and config.
MetaResult run_metalad(const Dataset& train, const Dataset& meta, Model model,
                       const MetaConfig& cfg);

void write_omega_trajectory_csv(std::ostream& os, const MetaResult& result);

}  // namespace imblab
