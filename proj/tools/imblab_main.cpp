// imblab: config-driven experiment runner for the synthetic imbalance lab.
//
// Verbs: gen, oracle, measure, train, metalad, sweep, verify.
// Exit codes: 0 ok, 2 config error, 3 numeric divergence, 4 validation failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "imblab/dataset_io.hpp"
#include "imblab/meta.hpp"
#include "imblab/metrics.hpp"
#include "imblab/normal.hpp"
#include "imblab/oracle.hpp"
#include "imblab/task.hpp"
#include "imblab/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace imblab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitValidation = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return j;
}

GaussianTaskSpec task_from_json(const json& t) {
    require_keys(t, "task",
                 {"variant", "d", "eta", "sigma", "K", "V", "alpha", "eps1", "eps2", "C",
                  "imbalance_ratio", "sigma_scales"});
    std::string v = t.at("variant").get<std::string>();
    auto d = t.value("d", 2);
    double eta = t.value("eta", 1.0);
    double sigma = t.value("sigma", 1.0);
    if (v == "binary_variance")
        return GaussianTaskSpec::binary_variance(d, eta, sigma, t.value("K", 1.0));
    if (v == "three_class_distance") return GaussianTaskSpec::three_class(d, eta, sigma);
    if (v == "feature_noise")
        return GaussianTaskSpec::feature_noise(d, eta, sigma, t.value("eps1", 0.0),
                                               t.value("eps2", 0.0));
    if (v == "mixed_prop_var")
        return GaussianTaskSpec::mixed_prop_var(d, eta, sigma, t.value("K", 1.0),
                                                t.value("V", 1.0));
    if (v == "local_two_cluster")
        return GaussianTaskSpec::local_two_cluster(sigma, t.value("alpha", 0.5));
    if (v == "long_tail_multiclass") {
        auto spec = GaussianTaskSpec::long_tail(t.value("C", 10), d, eta, sigma,
                                                t.value("imbalance_ratio", 1.0));
        if (t.contains("sigma_scales")) {
            spec.sigma_scales = t.at("sigma_scales").get<std::vector<double>>();
            spec.validate();
        }
        return spec;
    }
    throw ConfigError("unknown task variant '" + v + "'");
}

std::string timestamp_comment(bool deterministic) {
    if (deterministic) return "";
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream os;
    os << "generated " << now;
    return os.str();
}

void refuse_overwrite(const std::string& path, bool force) {
    if (!force && fs::exists(path))
        throw ConfigError("refusing to overwrite " + path + " (use --force)");
}

std::uint64_t env_seed_override(std::uint64_t fallback) {
    if (const char* s = std::getenv("IMBLAB_SEED")) return std::strtoull(s, nullptr, 10);
    return fallback;
}

std::string env_out_override(const std::string& fallback) {
    if (const char* s = std::getenv("IMBLAB_OUT")) return s;
    return fallback;
}

// ---------------------------------------------------------------- gen ----

int cmd_gen(const std::string& config_path, std::uint64_t seed, const std::string& out,
            bool force, bool deterministic) {
    json cfg = load_config(config_path);
    require_keys(cfg, "gen config", {"task", "count", "mode"});
    GaussianTaskSpec spec = task_from_json(cfg.at("task"));
    std::size_t count = cfg.at("count").get<std::size_t>();
    std::string mode_s = cfg.value("mode", "per_class");
    SampleMode mode = mode_s == "total" ? SampleMode::Total : SampleMode::PerClass;
    if (mode_s != "total" && mode_s != "per_class")
        throw ConfigError("gen: mode must be per_class or total");

    refuse_overwrite(out, force);
    RngStream rng(seed, stream_tag("taskgen"));
    Dataset ds = generate(spec, count, rng, mode);
    save_dataset(out, ds, timestamp_comment(deterministic));
    std::cout << "wrote " << out << " (" << ds.size() << " x " << ds.dim() << ")\n";
    return kExitOk;
}

// -------------------------------------------------------------- oracle ----

json oracle_result_json(const GaussianTaskSpec& spec, const OracleResult& res) {
    json j;
    j["task"] = spec.variant_name();
    j["d"] = spec.d;
    j["eta"] = spec.eta;
    j["sigma"] = spec.sigma;
    j["K"] = spec.K;
    j["V"] = spec.V;
    j["classifier"] = {{"w", res.classifier.w}, {"cuts", res.classifier.cuts}};
    j["per_class_error"] = res.per_class_error;
    j["gap"] = res.gap;
    j["intermediates"] = res.intermediates;
    if (!res.note.empty()) j["note"] = res.note;
    return j;
}

int cmd_oracle(const std::string& config_path, std::uint64_t seed, const std::string& out,
               bool force) {
    json cfg = load_config(config_path);
    require_keys(cfg, "oracle config", {"task", "mc_per_class", "alphas"});
    GaussianTaskSpec spec = task_from_json(cfg.at("task"));
    std::size_t mc = cfg.value("mc_per_class", std::size_t{0});

    json j;
    if (spec.variant == TaskVariant::LocalTwoCluster) {
        std::vector<double> alphas =
            cfg.value("alphas", std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.45});
        auto rows = local_gap(spec, alphas);
        j["task"] = spec.variant_name();
        j["rows"] = json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"alpha", r.alpha},
                                 {"threshold", r.threshold},
                                 {"err_near", r.err_near},
                                 {"err_far", r.err_far},
                                 {"gap", r.gap}});
    } else {
        OracleResult res;
        switch (spec.variant) {
            case TaskVariant::BinaryVariance: res = optimal_binary_variance(spec); break;
            case TaskVariant::ThreeClassDistance: res = bayes_three_class(spec); break;
            case TaskVariant::MixedPropVar: res = optimal_mixed(spec); break;
            default: throw ConfigError("oracle: unsupported task variant " + spec.variant_name());
        }
        j = oracle_result_json(spec, res);
        if (mc > 0) {
            RngStream rng(seed, stream_tag("oracle-mc"));
            j["monte_carlo_error"] = monte_carlo_error(res.classifier, spec, mc, rng);
            j["mc_per_class"] = mc;
        }
    }

    refuse_overwrite(out, force);
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot open " + out);
    os << j.dump(2) << "\n";
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------- measure ----

int cmd_measure(const std::string& in, const std::string& out_prefix, bool force) {
    Dataset ds = load_dataset(in);
    if (ds.num_classes() < 2) {
        std::cerr << "measure: dataset has a single class; imbalance metrics need at least two\n";
        return kExitValidation;
    }
    ImbalanceReport rep = report(ds);

    std::string json_path = out_prefix + ".json";
    std::string csv_path = out_prefix + "_pairs.csv";
    refuse_overwrite(json_path, force);
    refuse_overwrite(csv_path, force);
    {
        std::ofstream os(json_path);
        write_report_json(os, rep);
    }
    {
        std::ofstream os(csv_path);
        write_report_csv(os, rep);
    }
    std::cout << "wrote " << json_path << " and " << csv_path << "\n";
    return kExitOk;
}

// ------------------------------------------------------- train/metalad ----

struct DataBundle {
    Dataset train;
    Dataset test;
};

DataBundle make_data(const json& cfg, std::uint64_t seed) {
    const json& dc = cfg.at("data");
    require_keys(dc, "data", {"path", "train_count", "train_mode", "test_per_class"});
    DataBundle out;
    if (dc.contains("path")) {
        out.train = load_dataset(dc.at("path").get<std::string>());
        if (dc.contains("test_per_class"))
            throw ConfigError("data: test_per_class requires a generated task, not a path");
        return out;
    }
    GaussianTaskSpec spec = task_from_json(cfg.at("task"));
    std::size_t n = dc.at("train_count").get<std::size_t>();
    std::string mode_s = dc.value("train_mode", "total");
    SampleMode mode = mode_s == "total" ? SampleMode::Total : SampleMode::PerClass;
    RngStream rng(seed, stream_tag("taskgen"));
    out.train = generate(spec, n, rng, mode);
    std::size_t test_pc = dc.value("test_per_class", std::size_t{500});
    RngStream test_rng(seed, stream_tag("taskgen-test"));
    out.test = generate(spec, test_pc, test_rng, SampleMode::PerClass);
    return out;
}

Model model_from_json(const json& cfg, std::size_t input_dim, int C, std::uint64_t seed) {
    const json& mc = cfg.at("model");
    require_keys(mc, "model", {"kind", "hidden", "activation"});
    std::string kind = mc.value("kind", "linear");
    if (kind == "linear") return Model::linear(input_dim, C, seed);
    if (kind != "mlp") throw ConfigError("model: kind must be linear or mlp");
    std::size_t hidden = mc.value("hidden", std::size_t{16});
    std::string act_s = mc.value("activation", "relu");
    Activation act = act_s == "relu"    ? Activation::Relu
                     : act_s == "tanh"  ? Activation::Tanh
                     : act_s == "identity" ? Activation::Identity
                                        : throw ConfigError("model: unknown activation " + act_s);
    return Model::mlp(input_dim, hidden, C, act, seed);
}

TrainConfig train_config_from_json(const json& cfg, std::uint64_t seed) {
    const json& tc = cfg.at("train");
    require_keys(tc, "train",
                 {"epochs", "batch_size", "learning_rate", "momentum", "weight_decay",
                  "lr_milestones", "lr_decay", "loss", "lambda", "reweight",
                  "refresh_per_batch", "diagonal_stats"});
    TrainConfig out;
    out.epochs = tc.value("epochs", 10);
    out.batch_size = tc.value("batch_size", std::size_t{64});
    out.learning_rate = tc.value("learning_rate", 0.1);
    out.momentum = tc.value("momentum", 0.9);
    out.weight_decay = tc.value("weight_decay", 5e-4);
    out.lr_milestones = tc.value("lr_milestones", std::vector<int>{});
    out.lr_decay = tc.value("lr_decay", 0.1);
    out.reweight = tc.value("reweight", false);
    out.refresh_per_batch = tc.value("refresh_per_batch", false);
    out.stats_options.diagonal_only = tc.value("diagonal_stats", false);
    out.seed = seed;

    std::string loss = tc.value("loss", "ce");
    out.loss.lambda = tc.value("lambda", 1.0);
    if (loss == "ce") out.loss.kind = LossKind::CrossEntropy;
    else if (loss == "la") out.loss.kind = LossKind::LogitAdjust;
    else if (loss == "isda") out.loss.kind = LossKind::Isda;
    else if (loss == "nisda") out.loss.kind = LossKind::Nisda;
    else throw ConfigError("train: unknown loss '" + loss + "'");
    return out;
}

MetaConfig meta_config_from_json(const json& cfg, int C, std::uint64_t seed) {
    const json& tc = cfg.at("train");
    const json& mc = cfg.at("meta");
    require_keys(mc, "meta",
                 {"eta2", "batch_m", "T1", "T2", "per_class", "hypergrad", "meta_loss",
                  "omega_init", "active_terms", "omega_mode"});
    MetaConfig out;
    out.eta1 = tc.value("learning_rate", 0.1);
    out.eta2 = mc.value("eta2", 100.0);
    out.batch_n = tc.value("batch_size", std::size_t{64});
    out.batch_m = mc.value("batch_m", std::size_t{32});
    out.T1 = mc.value("T1", 0);
    out.T2 = mc.value("T2", 0);
    out.momentum = tc.value("momentum", 0.9);
    out.weight_decay = tc.value("weight_decay", 5e-4);
    out.lr_milestones = tc.value("lr_milestones", std::vector<int>{});
    out.lr_decay = tc.value("lr_decay", 0.1);
    out.refresh_per_batch = tc.value("refresh_per_batch", false);
    out.stats_options.diagonal_only = tc.value("diagonal_stats", false);
    out.seed = seed;

    double init = mc.value("omega_init", 1.0);
    std::string omode = mc.value("omega_mode", "per_pair");
    if (omode == "per_pair")
        out.omega_init = PerturbationParams::per_pair(C, init, init, init);
    else if (omode == "global")
        out.omega_init = PerturbationParams::global(init, init, init);
    else
        throw ConfigError("meta: omega_mode must be per_pair or global");

    std::string hg = mc.value("hypergrad", "unrolled");
    out.hypergrad = hg == "fd" ? HypergradMode::FiniteDifference : HypergradMode::UnrolledExact;
    std::string ml = mc.value("meta_loss", "perturbed");
    out.meta_loss = ml == "ce" ? MetaLossMode::PlainCE : MetaLossMode::Perturbed;
    if (mc.contains("active_terms")) {
        auto at = mc.at("active_terms").get<std::vector<bool>>();
        if (at.size() != 3) throw ConfigError("meta: active_terms must have 3 entries");
        for (int t = 0; t < 3; ++t) out.active_terms[t] = at[t];
    }
    return out;
}

json summarize_errors(const std::vector<double>& errors) {
    json j;
    j["per_class_error"] = errors;
    j["gap"] = gap_from_errors(errors);
    j["max_minus_min"] = max_minus_min(errors);
    double total = 0.0;
    for (double e : errors) total += e;
    j["mean_error"] = total / static_cast<double>(errors.size());
    return j;
}

int cmd_train(const std::string& config_path, std::int64_t seed_flag, const std::string& out_flag,
              bool force, bool deterministic, int threads, bool is_metalad) {
    json cfg = load_config(config_path);
    require_keys(cfg, "config",
                 {"task", "data", "model", "train", "meta", "seeds", "out_dir"});
    if (is_metalad && !cfg.contains("meta")) throw ConfigError("metalad: config needs a meta block");

    std::vector<std::uint64_t> seeds;
    if (seed_flag >= 0) seeds = {static_cast<std::uint64_t>(seed_flag)};
    else if (const char* s = std::getenv("IMBLAB_SEED")) seeds = {std::strtoull(s, nullptr, 10)};
    else if (cfg.contains("seeds")) {
        for (auto& v : cfg.at("seeds")) seeds.push_back(v.get<std::uint64_t>());
    } else seeds = {1};

    std::string out_dir = !out_flag.empty() ? out_flag
                                            : env_out_override(cfg.value("out_dir", "out"));
    fs::create_directories(out_dir);
    std::string summary_path = out_dir + "/summary.json";
    refuse_overwrite(summary_path, force);

    struct SeedOutput {
        std::uint64_t seed;
        TrainReport report;
        std::vector<double> test_error;
        Model model;
        std::vector<OmegaTrajectoryPoint> trajectory;
        PerturbationParams omega;
    };

    auto run_one = [&](std::uint64_t seed) {
        DataBundle data = make_data(cfg, seed);
        int C = std::max(data.train.num_classes(),
                         data.test.size() ? data.test.num_classes() : 0);
        Model model = model_from_json(cfg, data.train.dim(), C, seed);
        SeedOutput out;
        out.seed = seed;
        if (is_metalad) {
            MetaConfig mcfg = meta_config_from_json(cfg, C, seed);
            std::size_t per_class = cfg.at("meta").value("per_class", std::size_t{10});
            RngStream meta_rng(seed, stream_tag("meta-select"));
            Dataset meta = make_meta_set(data.train, per_class, meta_rng);
            MetaResult res = run_metalad(data.train, meta, std::move(model), mcfg);
            out.report = std::move(res.report);
            out.model = std::move(res.model);
            out.trajectory = std::move(res.trajectory);
            out.omega = std::move(res.omega);
        } else {
            TrainConfig tcfg = train_config_from_json(cfg, seed);
            TrainResult res = train(data.train, std::move(model), tcfg);
            out.report = std::move(res.report);
            out.model = std::move(res.model);
        }
        if (data.test.size()) out.test_error = evaluate(out.model, data.test);
        return out;
    };

    std::vector<SeedOutput> results(seeds.size());
    if (threads > 1 && seeds.size() > 1) {
        std::vector<std::future<SeedOutput>> futures;
        futures.reserve(seeds.size());
        for (std::uint64_t s : seeds)
            futures.push_back(std::async(std::launch::async, run_one, s));
        for (std::size_t i = 0; i < seeds.size(); ++i) results[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < seeds.size(); ++i) results[i] = run_one(seeds[i]);
    }

    json summary;
    summary["schema"] = "imblab-summary-v1";
    summary["command"] = is_metalad ? "metalad" : "train";
    summary["config"] = config_path;
    if (!deterministic) summary["generated"] = timestamp_comment(false);
    summary["runs"] = json::array();

    for (const auto& r : results) {
        std::string tag = "_seed" + std::to_string(r.seed);
        {
            std::ofstream os(out_dir + "/report" + tag + ".csv");
            write_train_report_csv(os, r.report);
        }
        {
            std::ofstream os(out_dir + "/delta_trace" + tag + ".csv");
            write_delta_trace_csv(os, r.report);
        }
        save_model(out_dir + "/checkpoint" + tag + ".imbm", r.model);
        if (is_metalad) {
            MetaResult tmp;
            tmp.trajectory = r.trajectory;
            tmp.omega = r.omega;
            std::ofstream os(out_dir + "/omega" + tag + ".csv");
            write_omega_trajectory_csv(os, tmp);
        }
        json run;
        run["seed"] = r.seed;
        run["train"] = summarize_errors(r.report.final_class_error);
        if (!r.test_error.empty()) run["test"] = summarize_errors(r.test_error);
        summary["runs"].push_back(run);
    }

    std::ofstream os(summary_path);
    os << summary.dump(2) << "\n";
    std::cout << "wrote " << summary_path << " (" << results.size() << " seeds)\n";
    return kExitOk;
}

// --------------------------------------------------------------- sweep ----

int cmd_sweep(const std::string& config_path, std::uint64_t seed, const std::string& out,
              bool force, bool deterministic, bool verify) {
    json cfg = load_config(config_path);
    require_keys(cfg, "sweep config", {"Ks", "Vs", "d", "eta", "sigma", "mc_per_class"});
    std::vector<double> Ks = cfg.value("Ks", std::vector<double>{1.5, 2, 3, 5});
    std::vector<double> Vs = cfg.value("Vs", std::vector<double>{1, 2, 5, 10});
    GaussianTaskSpec base = GaussianTaskSpec::mixed_prop_var(
        cfg.value("d", 2), cfg.value("eta", 5.0), cfg.value("sigma", 1.0), 2.0, 1.0);
    std::size_t mc = cfg.value("mc_per_class", std::size_t{0});

    refuse_overwrite(out, force);
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot open " + out);
    os << "# imblab csv v1 gap-grid\n";
    std::string comment = timestamp_comment(deterministic);
    if (!comment.empty()) os << "# " << comment << "\n";
    os << "K,V,gap,err_plus,err_minus,b_closed,b_numeric";
    if (mc > 0) os << ",mc_err_plus,mc_err_minus";
    os << "\n";

    GapGrid grid = corollary_grid(Ks, Vs, base);
    for (std::size_t i = 0; i < Ks.size(); ++i)
        for (std::size_t j = 0; j < Vs.size(); ++j) {
            GaussianTaskSpec spec =
                GaussianTaskSpec::mixed_prop_var(base.d, base.eta, base.sigma, Ks[i], Vs[j]);
            OracleResult res = optimal_mixed(spec);
            os << Ks[i] << "," << Vs[j] << "," << grid.gaps(i, j) << ","
               << res.per_class_error[0] << "," << res.per_class_error[1] << ","
               << res.intermediates.at("b_closed") << "," << res.intermediates.at("b_numeric");
            if (mc > 0) {
                RngStream rng(seed, stream_tag("sweep-mc"));
                RngStream cell = rng.substream(i * Vs.size() + j);
                auto err = monte_carlo_error(res.classifier, spec, mc, cell);
                os << "," << err[0] << "," << err[1];
            }
            os << "\n";
        }
    std::cout << "wrote " << out << "\n";

    if (!verify) return kExitOk;

    // Corollary clause checks on the grid
    int violations = 0;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) {
            ++violations;
            std::cerr << "sweep --verify: violated: " << what << "\n";
        }
    };
    for (std::size_t i = 0; i < Ks.size(); ++i)
        for (std::size_t j = 0; j < Vs.size(); ++j)
            if (Ks[i] == Vs[j]) check(grid.gaps(i, j) <= 1e-10, "gap(K=V) ~ 0");
    for (std::size_t i = 0; i < Ks.size(); ++i)
        for (std::size_t j = 0; j + 1 < Vs.size(); ++j) {
            if (Vs[j] < Ks[i] && Vs[j + 1] <= Ks[i])
                check(grid.gaps(i, j) >= grid.gaps(i, j + 1), "gap decreasing in V below K");
            if (Vs[j] >= Ks[i] && Vs[j + 1] > Ks[i])
                check(grid.gaps(i, j) <= grid.gaps(i, j + 1), "gap increasing in V above K");
        }
    for (std::size_t j = 0; j < Vs.size(); ++j)
        for (std::size_t i = 0; i + 1 < Ks.size(); ++i)
            if (Ks[i] >= Vs[j])
                check(grid.gaps(i, j) <= grid.gaps(i + 1, j), "gap increasing in K above V");
    return violations == 0 ? kExitOk : kExitValidation;
}

// -------------------------------------------------------------- verify ----

int cmd_verify(std::uint64_t seed) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
        if (!ok) ++failures;
    };

    check(std::abs(std_normal_cdf(0.0) - 0.5) < 1e-15, "normal cdf at 0");
    check(std::abs(std_normal_cdf(-1.959964) - 0.025) < 1e-6, "normal cdf 2.5% quantile");

    // distance-imbalance rule vs Monte Carlo
    auto spec3 = GaussianTaskSpec::three_class(2, 4.0, 4.0);
    auto res3 = bayes_three_class(spec3);
    RngStream rng(seed, stream_tag("verify"));
    auto mc3 = monte_carlo_error(res3.classifier, spec3, 200000, rng);
    bool ok3 = true;
    for (int c = 0; c < 3; ++c)
        ok3 = ok3 && std::abs(mc3[c] - res3.per_class_error[c]) < 0.005;
    check(ok3, "three-class rule matches Monte Carlo");

    // mixed-task closed form vs numeric minimizer
    bool okb = true;
    for (double K : {1.5, 3.0})
        for (double V : {1.0, 5.0}) {
            auto res = optimal_mixed(GaussianTaskSpec::mixed_prop_var(2, 5.0, 1.0, K, V));
            okb = okb && std::abs(res.intermediates.at("b_closed") -
                                  res.intermediates.at("b_numeric")) < 1e-6;
        }
    check(okb, "mixed-task closed form matches numeric minimizer");

    // local-imbalance monotonicity
    auto lg = local_gap(GaussianTaskSpec::local_two_cluster(1.0, 0.5),
                        {0.05, 0.1, 0.2, 0.3, 0.45});
    bool okl = true;
    for (std::size_t i = 0; i + 1 < lg.size(); ++i) okl = okl && lg[i].gap >= lg[i + 1].gap;
    check(okl, "sub-cluster gap non-increasing in alpha");

    // graph fixture
    auto fix = figure_graph_fixture();
    auto l = ldi(fix);
    bool okg = l.per_node[0] == 0.5 && l.per_node[1] == 1.0 / 3.0 && l.per_node[2] == 1.0 / 3.0 &&
               l.per_node[3] == 1.0 && l.per_node[4] == 1.0 && l.per_node[5] == 0.5;
    check(okg, "micro-graph heterophily fractions");

    return failures == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"imblab: synthetic class-imbalance laboratory"};
    app.require_subcommand(1);

    std::string config, out, in;
    std::int64_t seed_flag = -1;
    bool force = false, deterministic = false, verify_flag = false;
    int threads = 1;

    auto add_common = [&](CLI::App* cmd, bool with_config = true) {
        if (with_config) cmd->add_option("--config", config, "JSON config path")->required();
        cmd->add_option("--seed", seed_flag, "seed override");
        cmd->add_flag("--force", force, "overwrite existing outputs");
        cmd->add_flag("--deterministic", deterministic, "suppress timestamps in outputs");
        cmd->add_option("--threads", threads, "parallel seed jobs");
    };

    CLI::App* gen = app.add_subcommand("gen", "generate a dataset file");
    add_common(gen);
    gen->add_option("--out", out, "output path (.csv or .bin)")->required();

    CLI::App* oracle = app.add_subcommand("oracle", "closed-form classifier analysis");
    add_common(oracle);
    oracle->add_option("--out", out, "output JSON path")->required();

    CLI::App* measure = app.add_subcommand("measure", "imbalance metrics for a dataset");
    measure->add_option("--in", in, "dataset path")->required();
    measure->add_option("--out", out, "output prefix")->required();
    measure->add_flag("--force", force, "overwrite existing outputs");

    CLI::App* train_cmd = app.add_subcommand("train", "train a model per config");
    add_common(train_cmd);
    train_cmd->add_option("--out", out, "output directory");

    CLI::App* metalad = app.add_subcommand("metalad", "meta-learned perturbation training");
    add_common(metalad);
    metalad->add_option("--out", out, "output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "gap grid over K and V");
    add_common(sweep);
    sweep->add_option("--out", out, "output CSV path")->required();
    sweep->add_flag("--verify", verify_flag, "check the grid's monotonicity properties");

    CLI::App* verify = app.add_subcommand("verify", "run built-in cross checks");
    verify->add_option("--seed", seed_flag, "seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    std::uint64_t seed = env_seed_override(seed_flag >= 0 ? seed_flag : 1);

    try {
        if (gen->parsed()) return cmd_gen(config, seed, out, force, deterministic);
        if (oracle->parsed()) return cmd_oracle(config, seed, out, force);
        if (measure->parsed()) return cmd_measure(in, out, force);
        if (train_cmd->parsed())
            return cmd_train(config, seed_flag, out, force, deterministic, threads, false);
        if (metalad->parsed())
            return cmd_train(config, seed_flag, out, force, deterministic, threads, true);
        if (sweep->parsed())
            return cmd_sweep(config, seed, out, force, deterministic, verify_flag);
        if (verify->parsed()) return cmd_verify(seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        return msg.find("diverged") != std::string::npos || msg.find("non-finite") != std::string::npos
                   ? kExitDivergence
                   : kExitValidation;
    }
    return kExitConfig;
}
