#include "imblab/trainer.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace imblab {

void sgd_step(std::vector<double>& params, const std::vector<double>& grad,
              std::vector<double>& momentum_buf, double lr, double momentum, double weight_decay) {
    if (grad.size() != params.size() || momentum_buf.size() != params.size())
        throw std::invalid_argument("sgd_step: size mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = grad[i] + weight_decay * params[i];
        momentum_buf[i] = momentum * momentum_buf[i] + g;
        params[i] -= lr * momentum_buf[i];
    }
}

std::vector<double> evaluate(const Model& model, const Dataset& data) {
    DenseMatrix logits = model.forward(data.features);
    const int C = model.num_classes;
    std::vector<std::size_t> wrong(C, 0), seen(C, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto row = logits.row(i);
        int best = 0;
        for (int c = 1; c < C; ++c)
            if (row[c] > row[best]) best = c;  // ties keep the lower index
        ++seen[data.labels[i]];
        if (best != data.labels[i]) ++wrong[data.labels[i]];
    }
    std::vector<double> err(C, 0.0);
    for (int c = 0; c < C; ++c)
        if (seen[c] > 0) err[c] = static_cast<double>(wrong[c]) / static_cast<double>(seen[c]);
    return err;
}

double gap_from_errors(const std::vector<double>& errors) {
    double g = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i)
        for (std::size_t j = i + 1; j < errors.size(); ++j)
            g = std::max(g, std::abs(errors[i] - errors[j]));
    return g;
}

double max_minus_min(const std::vector<double>& errors) {
    double lo = errors[0], hi = errors[0];
    for (double e : errors) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    return hi - lo;
}

BatchSampler::BatchSampler(std::size_t n, std::size_t batch_size, RngStream stream)
    : order_(n), batch_(std::min(batch_size, n)), stream_(stream) {
    if (n == 0) throw std::invalid_argument("BatchSampler: empty dataset");
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    steps_per_epoch_ = (n + batch_ - 1) / batch_;
}

void BatchSampler::reshuffle() {
    for (std::size_t i = order_.size() - 1; i > 0; --i) {
        std::size_t j = stream_.next_below(i + 1);
        std::swap(order_[i], order_[j]);
    }
}

BatchSampler::Slice BatchSampler::next() {
    if (cursor_ == 0) reshuffle();
    std::size_t begin = cursor_;
    std::size_t end = std::min(cursor_ + batch_, order_.size());
    cursor_ = end == order_.size() ? 0 : end;
    return {&order_, begin, end};
}

Batch gather(const Dataset& data, const BatchSampler::Slice& slice) {
    Batch b;
    const std::size_t n = slice.end - slice.begin;
    b.x = DenseMatrix(n, data.dim());
    b.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t src = (*slice.order)[slice.begin + i];
        auto from = data.features.row(src);
        auto to = b.x.row(i);
        for (std::size_t j = 0; j < data.dim(); ++j) to[j] = from[j];
        b.y[i] = data.labels[src];
    }
    return b;
}

DenseMatrix delta_for(const LossSpec& loss, const PerturbationContext& ctx) {
    const int C = ctx.num_classes();
    switch (loss.kind) {
        case LossKind::CrossEntropy:
            return DenseMatrix(C, C);
        case LossKind::LogitAdjust: {
            std::vector<double> pi(C);
            for (int c = 0; c < C; ++c) pi[c] = ctx.stats[c].proportion;
            return la_delta(pi, loss.lambda);
        }
        case LossKind::Isda:
            return isda_delta(ctx, loss.lambda);
        case LossKind::Nisda:
            return nisda_delta(ctx, loss.lambda);
        case LossKind::MetaLadFixed:
            return metalad_delta(ctx, loss.omega);
    }
    throw std::logic_error("delta_for: unreachable");
}

namespace {

// mean delta components per class for the trace CSVs
std::vector<std::array<double, 3>> delta_components(const LossSpec& loss,
                                                    const PerturbationContext& ctx) {
    const int C = ctx.num_classes();
    std::vector<std::array<double, 3>> out(C, {0.0, 0.0, 0.0});
    for (int y = 0; y < C; ++y) {
        for (int c = 0; c < C; ++c) {
            if (c == y) continue;
            switch (loss.kind) {
                case LossKind::CrossEntropy:
                    break;
                case LossKind::LogitAdjust:
                    out[y][0] += loss.lambda * std::log(ctx.stats[c].proportion);
                    break;
                case LossKind::Isda:
                    out[y][1] += loss.lambda * ctx.quad(y, c);
                    break;
                case LossKind::Nisda:
                    out[y][1] += loss.lambda * ctx.var_term(y, c);
                    break;
                case LossKind::MetaLadFixed:
                    out[y][0] += loss.omega.coef(y, c, 0) * ctx.pi_term(y, c);
                    out[y][1] += loss.omega.coef(y, c, 1) * ctx.var_term(y, c);
                    out[y][2] += loss.omega.coef(y, c, 2) * ctx.dist_term(y, c);
                    break;
            }
        }
        for (double& v : out[y]) v /= (C - 1);
    }
    return out;
}

}  // namespace

TrainResult train(const Dataset& data, Model model, const TrainConfig& cfg) {
    data.validate();
    if (data.dim() != model.input_dim)
        throw std::invalid_argument("train: model input dim != dataset dim");
    const int C = model.num_classes;
    if (data.num_classes() > C) throw std::invalid_argument("train: dataset has more classes than model");

    RngStream shuffle_stream(cfg.seed, stream_tag("shuffle"));
    BatchSampler sampler(data.size(), cfg.batch_size, shuffle_stream);

    std::vector<double> momentum_buf(model.param_count(), 0.0);
    std::vector<double> class_weight(C, 1.0);
    std::vector<std::size_t> counts(C, 0);
    for (int l : data.labels) ++counts[l];
    if (cfg.reweight)
        for (int c = 0; c < C; ++c)
            if (counts[c] > 0)
                class_weight[c] = static_cast<double>(data.size()) /
                                  (static_cast<double>(C) * static_cast<double>(counts[c]));

    TrainResult out;
    out.model = std::move(model);
    TrainReport& report = out.report;

    PerturbationContext ctx;
    DenseMatrix delta;
    std::uint64_t ctx_version = 0;
    auto refresh_context = [&]() {
        auto stats = estimate_class_stats(out.model.features(data.features), data.labels,
                                          cfg.stats_options);
        ctx = PerturbationContext::build(stats, out.model.head_weights(), ++ctx_version);
        delta = delta_for(cfg.loss, ctx);
    };

    double lr = cfg.learning_rate;
    const std::size_t steps_per_epoch = sampler.steps_per_epoch();
    const std::size_t total_steps = static_cast<std::size_t>(cfg.epochs) * steps_per_epoch;

    int epoch = 0;
    for (std::size_t step = 0; step < total_steps; ++step) {
        if (sampler.at_epoch_start()) {
            // milestone decay fires once at the start of the listed 1-based epoch
            for (int m : cfg.lr_milestones)
                if (m == epoch + 1 && epoch > 0) lr *= cfg.lr_decay;
            refresh_context();
        }
        auto batch = gather(data, sampler.next());
        if (cfg.refresh_per_batch) refresh_context();

        DenseMatrix logits = out.model.forward(batch.x);
        DenseMatrix dlogits(batch.y.size(), C);
        const double bn = static_cast<double>(batch.y.size());
        double batch_loss = 0.0;
        for (std::size_t i = 0; i < batch.y.size(); ++i) {
            LossGrad lg = perturbed_ce(logits.row(i), batch.y[i], delta.row(batch.y[i]));
            double w = class_weight[batch.y[i]];
            batch_loss += w * lg.loss;
            for (int c = 0; c < C; ++c) dlogits(i, c) = w * lg.grad_logits[c] / bn;
        }
        if (!std::isfinite(batch_loss))
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step) +
                                     " (lr=" + std::to_string(lr) + "); training diverged");

        std::vector<double> grad = out.model.backward(batch.x, dlogits);
        sgd_step(out.model.params, grad, momentum_buf, lr, cfg.momentum, cfg.weight_decay);

        if ((step + 1) % steps_per_epoch == 0) {
            ++epoch;
            report.class_error.push_back(evaluate(out.model, data));
            report.delta_terms.push_back(delta_components(cfg.loss, ctx));

            // epoch diagnostics: mean loss, and the relative perturbation
            // effect (l' - l)/l per class over the full training set
            DenseMatrix all_logits = out.model.forward(data.features);
            std::vector<double> variation(C, 0.0);
            double mean_loss = 0.0;
            DenseMatrix zero_delta(C, C);
            for (std::size_t i = 0; i < data.size(); ++i) {
                int y = data.labels[i];
                LossGrad perturbed = perturbed_ce(all_logits.row(i), y, delta.row(y));
                LossGrad plain = perturbed_ce(all_logits.row(i), y, zero_delta.row(y));
                mean_loss += perturbed.loss;
                if (plain.loss > 0.0)
                    variation[y] += (perturbed.loss - plain.loss) / plain.loss;
            }
            for (int c = 0; c < C; ++c)
                if (counts[c] > 0) variation[c] /= static_cast<double>(counts[c]);
            report.loss_variation.push_back(variation);
            report.mean_loss.push_back(mean_loss / static_cast<double>(data.size()));
        }
    }

    report.final_class_error = evaluate(out.model, data);
    report.final_gap = gap_from_errors(report.final_class_error);
    report.final_max_minus_min = max_minus_min(report.final_class_error);
    return out;
}

void write_train_report_csv(std::ostream& os, const TrainReport& report) {
    os << "# imblab csv v1 train-report\n";
    os << "epoch,class,error,loss_variation\n";
    for (std::size_t e = 0; e < report.class_error.size(); ++e)
        for (std::size_t c = 0; c < report.class_error[e].size(); ++c)
            os << e + 1 << "," << c << "," << report.class_error[e][c] << ","
               << report.loss_variation[e][c] << "\n";
}

void write_delta_trace_csv(std::ostream& os, const TrainReport& report) {
    os << "# imblab csv v1 delta-trace\n";
    os << "epoch,class,proportion_term,variance_term,distance_term\n";
    for (std::size_t e = 0; e < report.delta_terms.size(); ++e)
        for (std::size_t c = 0; c < report.delta_terms[e].size(); ++c)
            os << e + 1 << "," << c << "," << report.delta_terms[e][c][0] << ","
               << report.delta_terms[e][c][1] << "," << report.delta_terms[e][c][2] << "\n";
}

}  // namespace imblab
