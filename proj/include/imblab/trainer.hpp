#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "imblab/dataset.hpp"
#include "imblab/losses.hpp"
#include "imblab/model.hpp"
#include "imblab/rng.hpp"

namespace imblab {

enum class LossKind { CrossEntropy, LogitAdjust, Isda, Nisda, MetaLadFixed };

struct LossSpec {
    LossKind kind = LossKind::CrossEntropy;
    double lambda = 1.0;          // LA / ISDA / NISDA coefficient
    PerturbationParams omega;     // MetaLadFixed coefficients
};

struct TrainConfig {
    int epochs = 10;
    std::size_t batch_size = 64;
    double learning_rate = 0.1;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    std::vector<int> lr_milestones;  // epochs at which lr is multiplied by lr_decay
    double lr_decay = 0.1;
    std::uint64_t seed = 1;
    LossSpec loss;
    bool reweight = false;           // per-sample weights 1/(C*pi_c)
    bool refresh_per_batch = false;  // context refresh cadence (default per epoch)
    ClassStatsOptions stats_options;
};

struct TrainReport {
    // one entry per epoch
    std::vector<std::vector<double>> class_error;                 // [epoch][class]
    std::vector<std::vector<double>> loss_variation;              // mean (l'-l)/l per class
    std::vector<std::vector<std::array<double, 3>>> delta_terms;  // mean delta components per class
    std::vector<double> mean_loss;

    std::vector<double> final_class_error;
    double final_gap = 0.0;            // max pairwise |error difference|
    double final_max_minus_min = 0.0;  // max class error - min class error
};

struct TrainResult {
    Model model;
    TrainReport report;
};

/// Momentum SGD with L2 weight decay folded into the gradient
/// (v <- mu v + g + wd*p; p <- p - lr v). Deterministic.
void sgd_step(std::vector<double>& params, const std::vector<double>& grad,
              std::vector<double>& momentum_buf, double lr, double momentum, double weight_decay);

/// Per-class error under argmax decisions; ties break toward the lower
/// class index.
std::vector<double> evaluate(const Model& model, const Dataset& data);

double gap_from_errors(const std::vector<double>& errors);            // max pairwise diff
double max_minus_min(const std::vector<double>& errors);

/// Deterministic epoch/batch index stream shared by train() and the meta
/// loop so their warmup phases see identical batches.
class BatchSampler {
public:
    BatchSampler(std::size_t n, std::size_t batch_size, RngStream stream);

    struct Slice {
        const std::vector<std::size_t>* order;
        std::size_t begin, end;
    };

    /// Next batch; reshuffles at epoch boundaries.
    Slice next();
    std::size_t steps_per_epoch() const { return steps_per_epoch_; }
    bool at_epoch_start() const { return cursor_ == 0; }

private:
    void reshuffle();
    std::vector<std::size_t> order_;
    std::size_t batch_;
    std::size_t cursor_ = 0;
    std::size_t steps_per_epoch_;
    RngStream stream_;
};

struct Batch {
    DenseMatrix x;
    std::vector<int> y;
};

Batch gather(const Dataset& data, const BatchSampler::Slice& slice);

/// Perturbation matrix for the configured loss given a fresh context.
DenseMatrix delta_for(const LossSpec& loss, const PerturbationContext& ctx);

/// Mini-batch SGD over the configured loss; the perturbation context is
/// refreshed from current features/head weights once per epoch (or per
/// batch when configured). Throws on numeric divergence.
TrainResult train(const Dataset& data, Model model, const TrainConfig& cfg);

void write_train_report_csv(std::ostream& os, const TrainReport& report);
void write_delta_trace_csv(std::ostream& os, const TrainReport& report);

}  // namespace imblab
