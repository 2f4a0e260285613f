#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "imblab/dataset_io.hpp"
#include "imblab/metrics.hpp"
#include "imblab/task.hpp"

using namespace imblab;

namespace {

// empirical class stats vs the generative ground truth: means within
// 5 standard errors, variances within 5%
void check_against_true_stats(const GaussianTaskSpec& spec, std::size_t n_per_class,
                              std::uint64_t seed) {
    RngStream rng(seed, stream_tag("taskgen"));
    Dataset ds = generate(spec, n_per_class, rng, SampleMode::PerClass);
    auto emp = estimate_class_stats(ds);
    auto truth = true_stats(spec);
    REQUIRE(emp.size() == truth.size());
    for (std::size_t c = 0; c < truth.size(); ++c) {
        for (std::size_t j = 0; j < spec.d; ++j) {
            double se = std::sqrt(truth[c].cov(j, j) / static_cast<double>(n_per_class));
            CAPTURE(c); CAPTURE(j);
            CHECK(std::abs(emp[c].mean[j] - truth[c].mean[j]) < 5.0 * se);
            CHECK(emp[c].cov(j, j) == doctest::Approx(truth[c].cov(j, j)).epsilon(0.05));
        }
    }
}

}  // namespace

TEST_CASE("every variant matches its population statistics") {
    check_against_true_stats(GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 3.0), 100000, 21);
    check_against_true_stats(GaussianTaskSpec::three_class(2, 4.0, 1.0), 100000, 22);
    check_against_true_stats(GaussianTaskSpec::feature_noise(2, 1.0, 1.0, 2.0, 0.0), 100000, 23);
    check_against_true_stats(GaussianTaskSpec::mixed_prop_var(3, 1.0, 1.0, 3.0, 5.0), 100000, 24);
    check_against_true_stats(GaussianTaskSpec::local_two_cluster(1.0, 0.3), 100000, 25);
    check_against_true_stats(GaussianTaskSpec::long_tail(4, 5, 1.0, 1.0, 10.0), 100000, 26);
}

TEST_CASE("binary variance task has per-axis variance ratio K^2") {
    auto spec = GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 3.0);
    RngStream rng(31, stream_tag("taskgen"));
    Dataset ds = generate(spec, 100000, rng, SampleMode::PerClass);
    auto stats = estimate_class_stats(ds);
    for (int j = 0; j < 2; ++j) {
        CHECK(stats[0].cov(j, j) == doctest::Approx(9.0).epsilon(0.05));
        CHECK(stats[1].cov(j, j) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("fully balanced mixed task degenerates cleanly") {
    auto spec = GaussianTaskSpec::mixed_prop_var(2, 1.0, 1.0, 1.0, 1.0);
    RngStream rng(32, stream_tag("taskgen"));
    const std::size_t n = 100000;
    Dataset ds = generate(spec, n, rng, SampleMode::Total);
    std::size_t n0 = 0;
    for (int l : ds.labels)
        if (l == 0) ++n0;
    double se = std::sqrt(0.25 / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(n0) / n - 0.5) < 3.0 * se);
    auto stats = estimate_class_stats(ds);
    CHECK(stats[0].cov(0, 0) == doctest::Approx(stats[1].cov(0, 0)).epsilon(0.05));
}

TEST_CASE("local two-cluster split puts alpha of the class at the near region") {
    auto spec = GaussianTaskSpec::local_two_cluster(1.0, 0.1);
    RngStream rng(33, stream_tag("taskgen"));
    Dataset ds = generate(spec, 100000, rng, SampleMode::PerClass);
    // classify class-1 samples by proximity to [1,1] vs [3,3]
    std::size_t near = 0, total = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] != 1) continue;
        ++total;
        double proj = (ds.features(i, 0) + ds.features(i, 1)) / 2.0;  // midpoint at 2
        if (proj < 2.0) ++near;
    }
    double frac = static_cast<double>(near) / static_cast<double>(total);
    // binomial noise plus ~1e-2-scale boundary crossings
    CHECK(frac == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("label marginals follow the long-tail profile") {
    auto spec = GaussianTaskSpec::long_tail(10, 10, 1.0, 1.0, 100.0);
    RngStream rng(34, stream_tag("taskgen"));
    const std::size_t n = 200000;
    Dataset ds = generate(spec, n, rng, SampleMode::Total);
    auto truth = true_stats(spec);
    std::vector<std::size_t> counts(10, 0);
    for (int l : ds.labels) ++counts[l];
    CHECK(truth[0].proportion / truth[9].proportion == doctest::Approx(100.0).epsilon(1e-9));
    for (int c = 0; c < 10; ++c) {
        double p = truth[c].proportion;
        double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
        CHECK(std::abs(static_cast<double>(counts[c]) / n - p) < 5.0 * se);
    }
}

TEST_CASE("true_stats exact values") {
    SUBCASE("three-class centers and priors") {
        auto truth = true_stats(GaussianTaskSpec::three_class(2, 4.0, 1.0));
        CHECK(truth[0].mean == std::vector<double>{4.0, 4.0});
        CHECK(truth[1].mean == std::vector<double>{0.0, 0.0});
        CHECK(truth[2].mean == std::vector<double>{-4.0, -4.0});
        for (const auto& s : truth) CHECK(s.proportion == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("K = 1 removes variance imbalance") {
        auto truth = true_stats(GaussianTaskSpec::binary_variance(3, 1.0, 2.0, 1.0));
        CHECK(truth[0].cov == truth[1].cov);
    }
    SUBCASE("feature noise adds to per-axis variances") {
        auto truth = true_stats(GaussianTaskSpec::feature_noise(2, 1.0, 1.0, 2.0, 0.0));
        CHECK(truth[0].cov(0, 0) == doctest::Approx(5.0));
        CHECK(truth[1].cov(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("long-tail centers are equidistant") {
        auto spec = GaussianTaskSpec::long_tail(6, 8, 1.5, 1.0, 50.0);
        DenseMatrix centers = class_centers(spec);
        CHECK(equidistance_penalty(centers) == doctest::Approx(0.0).epsilon(1e-9));
        for (int c = 0; c < 6; ++c)
            CHECK(norm2(centers.row(c)) ==
                  doctest::Approx(1.5 * std::sqrt(8.0)).epsilon(1e-12));
    }
}

TEST_CASE("generate is deterministic per seed") {
    auto spec = GaussianTaskSpec::mixed_prop_var(3, 1.0, 1.0, 2.0, 3.0);
    RngStream r1(77, stream_tag("taskgen")), r2(77, stream_tag("taskgen"));
    Dataset a = generate(spec, 5000, r1, SampleMode::Total);
    Dataset b = generate(spec, 5000, r2, SampleMode::Total);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
}

TEST_CASE("generate rejects bad inputs") {
    auto spec = GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 2.0);
    RngStream rng(1);
    CHECK_THROWS_AS(generate(spec, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(GaussianTaskSpec::binary_variance(2, -1.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(GaussianTaskSpec::local_two_cluster(1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(GaussianTaskSpec::long_tail(10, 4, 1.0, 1.0, 100.0), std::invalid_argument);
}

TEST_CASE("toy graph expected heterophily") {
    SUBCASE("fully homophilous graph has zero heterophily everywhere") {
        RngStream rng(41, stream_tag("graph"));
        Dataset g = toy_graph(200, 2, {0.0, 0.0}, rng);
        auto l = ldi(g);
        for (double v : l.per_node) CHECK(v == 0.0);
    }

    SUBCASE("per-class means land within 0.05 of the target") {
        RngStream rng(42, stream_tag("graph"));
        Dataset g = toy_graph(500, 3, {0.8, 0.3, 0.3}, rng);
        auto l = ldi(g);
        CHECK(std::abs(l.per_class[0] - 0.8) < 0.05);
        CHECK(std::abs(l.per_class[1] - 0.3) < 0.05);
        CHECK(std::abs(l.per_class[2] - 0.3) < 0.05);
    }

    SUBCASE("micro-graph fixture reproduces the known fractions") {
        auto l = ldi(figure_graph_fixture());
        CHECK(l.per_node[0] == 0.5);
        CHECK(l.per_node[1] == doctest::Approx(1.0 / 3.0));
        CHECK(l.per_node[2] == doctest::Approx(1.0 / 3.0));
        CHECK(l.per_node[3] == 1.0);
        CHECK(l.per_node[4] == 1.0);
        CHECK(l.per_node[5] == 0.5);
    }

    SUBCASE("invalid requests are rejected") {
        RngStream rng(43);
        CHECK_THROWS_AS(toy_graph(0, 2, {0.5, 0.5}, rng), std::invalid_argument);
        CHECK_THROWS_AS(toy_graph(10, 1, {0.5}, rng), std::invalid_argument);
        CHECK_THROWS_AS(toy_graph(10, 2, {0.5, 1.5}, rng), std::invalid_argument);
        CHECK_THROWS_AS(toy_graph(100, 2, {0.0, 0.5}, rng), std::invalid_argument);
    }
}

TEST_CASE("dataset serialization round trips") {
    auto spec = GaussianTaskSpec::mixed_prop_var(3, 1.0, 1.0, 2.0, 3.0);
    RngStream rng(55, stream_tag("io"));
    Dataset ds = generate(spec, 500, rng, SampleMode::Total);

    SUBCASE("csv") {
        std::stringstream ss;
        write_dataset_csv(ss, ds);
        Dataset back = read_dataset_csv(ss);
        CHECK(back.features == ds.features);
        CHECK(back.labels == ds.labels);
    }

    SUBCASE("binary with adjacency") {
        RngStream grng(56, stream_tag("io"));
        Dataset g = toy_graph(50, 3, {0.5, 0.5, 0.5}, grng);
        std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
        write_dataset_binary(ss, g);
        Dataset back = read_dataset_binary(ss);
        CHECK(back.features == g.features);
        CHECK(back.labels == g.labels);
        REQUIRE(back.adjacency.has_value());
        CHECK(*back.adjacency == *g.adjacency);
    }

    SUBCASE("csv refuses graphs") {
        RngStream grng(57, stream_tag("io"));
        Dataset g = toy_graph(30, 2, {0.5, 0.5}, grng);
        std::stringstream ss;
        CHECK_THROWS_AS(write_dataset_csv(ss, g), std::invalid_argument);
    }

    SUBCASE("binary corruption detected") {
        std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
        ss << "NOPE";
        CHECK_THROWS_AS(read_dataset_binary(ss), std::runtime_error);
    }
}
