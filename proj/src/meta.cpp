#include "imblab/meta.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace imblab {
namespace {

// mean-batch gradient of the perturbed CE over the flat parameters,
// optionally returning the per-sample softmax rows
std::vector<double> perturbed_batch_grad(const Model& model, const Batch& batch,
                                         const DenseMatrix& delta, DenseMatrix* probs_out,
                                         double* loss_out) {
    const int C = model.num_classes;
    const std::size_t n = batch.y.size();
    DenseMatrix logits = model.forward(batch.x);
    DenseMatrix dlogits(n, C);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        LossGrad lg = perturbed_ce(logits.row(i), batch.y[i], delta.row(batch.y[i]));
        loss += lg.loss;
        for (int c = 0; c < C; ++c) dlogits(i, c) = lg.grad_logits[c] / static_cast<double>(n);
        if (probs_out) {
            // grad over non-targets is the softmax; undo the one-hot on target
            for (int c = 0; c < C; ++c) (*probs_out)(i, c) = lg.grad_logits[c];
            (*probs_out)(i, batch.y[i]) += 1.0;
        }
    }
    if (loss_out) *loss_out = loss / static_cast<double>(n);
    return model.backward(batch.x, dlogits);
}

DenseMatrix delta_for_mode(const PerturbationContext& ctx, const PerturbationParams& omega,
                           MetaLossMode mode) {
    if (mode == MetaLossMode::PlainCE)
        return DenseMatrix(ctx.num_classes(), ctx.num_classes());
    return metalad_delta(ctx, omega);
}

}  // namespace

Model temp_update(const Model& model, const Batch& batch, const PerturbationContext& ctx,
                  const PerturbationParams& omega, double eta1) {
    DenseMatrix delta = metalad_delta(ctx, omega);
    std::vector<double> grad = perturbed_batch_grad(model, batch, delta, nullptr, nullptr);
    Model out = model;
    for (std::size_t i = 0; i < out.params.size(); ++i) out.params[i] -= eta1 * grad[i];
    return out;
}

double batch_loss(const Model& model, const Batch& batch, const PerturbationContext& ctx,
                  const PerturbationParams& omega, MetaLossMode mode) {
    DenseMatrix delta = delta_for_mode(ctx, omega, mode);
    DenseMatrix logits = model.forward(batch.x);
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.y.size(); ++i)
        loss += perturbed_ce(logits.row(i), batch.y[i], delta.row(batch.y[i])).loss;
    return loss / static_cast<double>(batch.y.size());
}

std::vector<double> hypergradient(const Model& model, const Batch& train_batch,
                                  const Batch& meta_batch, const PerturbationContext& ctx,
                                  const PerturbationParams& omega, double eta1,
                                  HypergradMode mode, MetaLossMode meta_mode) {
    const int C = model.num_classes;

    if (mode == HypergradMode::FiniteDifference) {
        std::vector<double> grad(omega.size(), 0.0);
        const double h = 1e-4;
        for (std::size_t k = 0; k < omega.size(); ++k) {
            PerturbationParams lo = omega, hi = omega;
            lo.lam[k] -= h;
            hi.lam[k] += h;
            Model m_hi = temp_update(model, train_batch, ctx, hi, eta1);
            Model m_lo = temp_update(model, train_batch, ctx, lo, eta1);
            grad[k] = (batch_loss(m_hi, meta_batch, ctx, hi, meta_mode) -
                       batch_loss(m_lo, meta_batch, ctx, lo, meta_mode)) /
                      (2.0 * h);
        }
        return grad;
    }

    // --- exact one-step unrolling ---
    // Theta_hat = Theta - eta1 * g(Theta, Omega); Omega enters g only via the
    // perturbation deltas, so d g / d lambda = J' dp/dlambda with J the
    // (Omega-independent) logit Jacobian at Theta.
    const std::size_t n = train_batch.y.size();
    DenseMatrix delta = metalad_delta(ctx, omega);

    DenseMatrix train_probs(n, C);
    std::vector<double> g_inner =
        perturbed_batch_grad(model, train_batch, delta, &train_probs, nullptr);

    Model hat = model;
    for (std::size_t i = 0; i < hat.params.size(); ++i) hat.params[i] -= eta1 * g_inner[i];

    // meta-loss gradient at Theta_hat
    const std::size_t m = meta_batch.y.size();
    DenseMatrix meta_delta = delta_for_mode(ctx, omega, meta_mode);
    DenseMatrix meta_probs(m, C);
    std::vector<double> g_meta =
        perturbed_batch_grad(hat, meta_batch, meta_delta, &meta_probs, nullptr);

    std::vector<double> grad(omega.size(), 0.0);

    // direct dependence of the perturbed meta loss on Omega
    if (meta_mode == MetaLossMode::Perturbed) {
        for (std::size_t j = 0; j < m; ++j) {
            const int y = meta_batch.y[j];
            for (int c = 0; c < C; ++c) {
                if (c == y) continue;
                double p = meta_probs(j, c);
                double terms[3] = {ctx.pi_term(y, c), ctx.var_term(y, c), ctx.dist_term(y, c)};
                for (int t = 0; t < 3; ++t) {
                    double g = p * terms[t] / static_cast<double>(m);
                    if (omega.mode == PerturbationParams::Mode::GlobalLambda)
                        grad[t] += g;
                    else
                        grad[omega.pair_index(y, c, t)] += g;
                }
            }
        }
    }

    // chain through Theta_hat: per train sample, u = J(Theta) . g_meta and
    // dp/ddelta_c = p_c (e_c - p)
    DenseMatrix u = model.jvp(train_batch.x, g_meta);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = train_batch.y[i];
        double udotp = 0.0;
        for (int c = 0; c < C; ++c) udotp += u(i, c) * train_probs(i, c);
        for (int c = 0; c < C; ++c) {
            if (c == y) continue;
            double pc = train_probs(i, c);
            double shared = -eta1 / static_cast<double>(n) * pc * (u(i, c) - udotp);
            double terms[3] = {ctx.pi_term(y, c), ctx.var_term(y, c), ctx.dist_term(y, c)};
            for (int t = 0; t < 3; ++t) {
                double g = shared * terms[t];
                if (omega.mode == PerturbationParams::Mode::GlobalLambda)
                    grad[t] += g;
                else
                    grad[omega.pair_index(y, c, t)] += g;
            }
        }
    }
    return grad;
}

std::vector<double> finite_difference_hypergradient(
    const std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)>&
        inner_grad,
    const std::function<double(const std::vector<double>&, const std::vector<double>&)>& meta_loss,
    const std::vector<double>& theta, const std::vector<double>& omega, double eta1, double step) {
    auto value = [&](const std::vector<double>& om) {
        std::vector<double> g = inner_grad(theta, om);
        std::vector<double> hat(theta);
        for (std::size_t i = 0; i < hat.size(); ++i) hat[i] -= eta1 * g[i];
        return meta_loss(hat, om);
    };
    std::vector<double> grad(omega.size(), 0.0);
    for (std::size_t k = 0; k < omega.size(); ++k) {
        std::vector<double> hi = omega, lo = omega;
        hi[k] += step;
        lo[k] -= step;
        grad[k] = (value(hi) - value(lo)) / (2.0 * step);
    }
    return grad;
}

Dataset make_meta_set(const Dataset& train, std::size_t per_class, RngStream& rng) {
    const int C = train.num_classes();
    std::vector<std::vector<std::size_t>> by_class(C);
    for (std::size_t i = 0; i < train.size(); ++i) by_class[train.labels[i]].push_back(i);
    for (int c = 0; c < C; ++c)
        if (by_class[c].size() < per_class)
            throw std::invalid_argument("make_meta_set: class " + std::to_string(c) +
                                        " has fewer samples than requested per class");

    Dataset meta;
    meta.features = DenseMatrix(per_class * C, train.dim());
    meta.labels.reserve(per_class * C);
    std::size_t row = 0;
    for (int c = 0; c < C; ++c) {
        // partial Fisher-Yates: the first per_class entries become a
        // uniform sample without replacement
        auto& idx = by_class[c];
        for (std::size_t i = 0; i < per_class; ++i) {
            std::size_t j = i + rng.next_below(idx.size() - i);
            std::swap(idx[i], idx[j]);
            auto from = train.features.row(idx[i]);
            auto to = meta.features.row(row++);
            for (std::size_t k = 0; k < train.dim(); ++k) to[k] = from[k];
            meta.labels.push_back(c);
        }
    }
    return meta;
}

MetaResult run_metalad(const Dataset& train, const Dataset& meta, Model model,
                       const MetaConfig& cfg) {
    train.validate();
    meta.validate();
    if (cfg.T1 >= cfg.T2) throw std::invalid_argument("run_metalad: requires T1 < T2");
    if (cfg.batch_m > meta.size())
        throw std::invalid_argument("run_metalad: meta batch larger than meta set");
    {
        std::vector<std::size_t> counts(train.num_classes(), 0);
        for (int l : meta.labels) ++counts[l];
        for (std::size_t c = 1; c < counts.size(); ++c)
            if (counts[c] != counts[0] && !cfg.allow_imbalanced_meta)
                throw std::invalid_argument(
                    "run_metalad: meta set is not class-balanced (set allow_imbalanced_meta to "
                    "override)");
    }

    const int C = model.num_classes;
    RngStream shuffle_stream(cfg.seed, stream_tag("shuffle"));
    BatchSampler sampler(train.size(), cfg.batch_n, shuffle_stream);
    RngStream meta_stream(cfg.seed, stream_tag("meta-shuffle"));
    BatchSampler meta_sampler(meta.size(), cfg.batch_m, meta_stream);

    MetaResult out;
    out.model = std::move(model);
    out.omega = cfg.omega_init;
    if (out.omega.mode == PerturbationParams::Mode::PerPair && out.omega.num_classes != C)
        throw std::invalid_argument("run_metalad: omega class count != model classes");

    std::vector<double> momentum_buf(out.model.param_count(), 0.0);
    std::vector<std::size_t> counts(C, 0);
    for (int l : train.labels) ++counts[l];

    PerturbationContext ctx;
    std::uint64_t ctx_version = 0;
    auto refresh_context = [&]() {
        auto stats = estimate_class_stats(out.model.features(train.features), train.labels,
                                          cfg.stats_options);
        ctx = PerturbationContext::build(stats, out.model.head_weights(), ++ctx_version);
    };

    auto mask_inactive = [&](std::vector<double>& g) {
        for (std::size_t k = 0; k < g.size(); ++k)
            if (!cfg.active_terms[k % 3]) g[k] = 0.0;
    };

    const std::size_t steps_per_epoch = sampler.steps_per_epoch();
    double lr = cfg.eta1;
    int epoch = 0;

    TrainReport& report = out.report;
    DenseMatrix zero_delta(C, C);

    for (int step = 1; step <= cfg.T2; ++step) {
        if (sampler.at_epoch_start()) {
            for (int m : cfg.lr_milestones)
                if (m == epoch + 1 && epoch > 0) lr *= cfg.lr_decay;
            refresh_context();
        }
        Batch batch = gather(train, sampler.next());
        const bool warmup = step <= cfg.T1;

        if (warmup) {
            // plain CE phase, identical to train() with a CE loss
            double loss = 0.0;
            std::vector<double> grad =
                perturbed_batch_grad(out.model, batch, zero_delta, nullptr, &loss);
            if (!std::isfinite(loss))
                throw std::runtime_error("run_metalad: non-finite warmup loss at step " +
                                         std::to_string(step));
            sgd_step(out.model.params, grad, momentum_buf, lr, cfg.momentum, cfg.weight_decay);
        } else {
            if (cfg.refresh_per_batch) refresh_context();
            Batch meta_batch = gather(meta, meta_sampler.next());

            std::vector<double> hg = hypergradient(out.model, batch, meta_batch, ctx, out.omega,
                                                   lr, cfg.hypergrad, cfg.meta_loss);
            mask_inactive(hg);
            for (std::size_t k = 0; k < hg.size(); ++k)
                out.omega.lam[k] -= cfg.eta2 * hg[k];
            if (!out.omega.finite())
                throw std::runtime_error("run_metalad: omega became non-finite at step " +
                                         std::to_string(step));
            out.trajectory.push_back({step, out.omega.lam});

            // real update with the fresh Omega (loss recomputed as specified)
            DenseMatrix delta = metalad_delta(ctx, out.omega);
            double loss = 0.0;
            std::vector<double> grad =
                perturbed_batch_grad(out.model, batch, delta, nullptr, &loss);
            if (!std::isfinite(loss))
                throw std::runtime_error("run_metalad: non-finite loss at step " +
                                         std::to_string(step));
            sgd_step(out.model.params, grad, momentum_buf, lr, cfg.momentum, cfg.weight_decay);
        }

        if (step % steps_per_epoch == 0 || step == cfg.T2) {
            ++epoch;
            report.class_error.push_back(evaluate(out.model, train));
            DenseMatrix delta = warmup ? zero_delta : metalad_delta(ctx, out.omega);
            DenseMatrix all_logits = out.model.forward(train.features);
            std::vector<double> variation(C, 0.0);
            double mean_loss = 0.0;
            for (std::size_t i = 0; i < train.size(); ++i) {
                int y = train.labels[i];
                LossGrad perturbed = perturbed_ce(all_logits.row(i), y, delta.row(y));
                LossGrad plain = perturbed_ce(all_logits.row(i), y, zero_delta.row(y));
                mean_loss += perturbed.loss;
                if (plain.loss > 0.0) variation[y] += (perturbed.loss - plain.loss) / plain.loss;
            }
            for (int c = 0; c < C; ++c)
                if (counts[c] > 0) variation[c] /= static_cast<double>(counts[c]);
            report.loss_variation.push_back(variation);
            report.mean_loss.push_back(mean_loss / static_cast<double>(train.size()));

            std::vector<std::array<double, 3>> comps(C, {0.0, 0.0, 0.0});
            if (!warmup) {
                for (int y = 0; y < C; ++y) {
                    for (int c = 0; c < C; ++c) {
                        if (c == y) continue;
                        comps[y][0] += out.omega.coef(y, c, 0) * ctx.pi_term(y, c);
                        comps[y][1] += out.omega.coef(y, c, 1) * ctx.var_term(y, c);
                        comps[y][2] += out.omega.coef(y, c, 2) * ctx.dist_term(y, c);
                    }
                    for (double& v : comps[y]) v /= (C - 1);
                }
            }
            report.delta_terms.push_back(comps);
        }
    }

    report.final_class_error = evaluate(out.model, train);
    report.final_gap = gap_from_errors(report.final_class_error);
    report.final_max_minus_min = max_minus_min(report.final_class_error);
    return out;
}

void write_omega_trajectory_csv(std::ostream& os, const MetaResult& result) {
    os << "# imblab csv v1 omega-trajectory\n";
    const auto& omega = result.omega;
    if (omega.mode == PerturbationParams::Mode::GlobalLambda) {
        os << "step,lambda0,lambda1,lambda2\n";
        for (const auto& p : result.trajectory)
            os << p.step << "," << p.lam[0] << "," << p.lam[1] << "," << p.lam[2] << "\n";
        return;
    }
    os << "step,y,c,lambda1,lambda2,lambda3\n";
    const int C = omega.num_classes;
    for (const auto& p : result.trajectory)
        for (int y = 0; y < C; ++y)
            for (int c = 0; c < C; ++c) {
                if (y == c) continue;
                std::size_t base = omega.pair_index(y, c, 0);
                os << p.step << "," << y << "," << c << "," << p.lam[base] << ","
                   << p.lam[base + 1] << "," << p.lam[base + 2] << "\n";
            }
}

}  // namespace imblab
