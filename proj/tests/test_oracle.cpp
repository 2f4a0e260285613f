#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "imblab/normal.hpp"
#include "imblab/oracle.hpp"

using namespace imblab;

TEST_CASE("minimize_scalar finds interior minima") {
    double x = minimize_scalar([](double v) { return (v - 1.7) * (v - 1.7) + 3.0; }, -10, 10);
    CHECK(x == doctest::Approx(1.7).epsilon(1e-8));
    // non-unimodal objective with a global valley and a side hump
    auto f = [](double v) {
        return -std::exp(-(v - 2) * (v - 2)) - 0.3 * std::exp(-(v + 4) * (v + 4));
    };
    CHECK(minimize_scalar(f, -10, 10) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("variance-only task: gap appears iff K > 1 and the wide class is harder") {
    SUBCASE("K = 1 is symmetric") {
        // derivative-free minimization resolves b only to ~sqrt(eps)
        auto res = optimal_binary_variance(GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 1.0));
        CHECK(std::abs(res.per_class_error[0] - res.per_class_error[1]) <= 1e-7);
        CHECK(res.gap <= 1e-7);
        CHECK(std::abs(res.intermediates.at("b")) <= 1e-6);
    }
    SUBCASE("K = 3 opens a gap against the wide class") {
        auto res = optimal_binary_variance(GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 3.0));
        CHECK(res.gap > 0.0);
        CHECK(res.per_class_error[0] > res.per_class_error[1]);
    }
    SUBCASE("gap grows with K") {
        auto g2 = optimal_binary_variance(GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 2.0)).gap;
        auto g5 = optimal_binary_variance(GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 5.0)).gap;
        CHECK(g5 > g2);
    }
    SUBCASE("numeric threshold agrees with Monte Carlo") {
        auto spec = GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 3.0);
        auto res = optimal_binary_variance(spec);
        RngStream rng(61, stream_tag("oracle-mc"));
        auto mc = monte_carlo_error(res.classifier, spec, 1000000, rng);
        CHECK(std::abs(mc[0] - res.per_class_error[0]) < 0.002);
        CHECK(std::abs(mc[1] - res.per_class_error[1]) < 0.002);
    }
}

TEST_CASE("three-class rule: exact errors, published variant preserved") {
    auto spec = GaussianTaskSpec::three_class(2, 4.0, 4.0);
    auto res = bayes_three_class(spec);

    SUBCASE("outer classes match, middle class pays twice") {
        CHECK(res.per_class_error[0] == res.per_class_error[2]);
        CHECK(res.per_class_error[1] == doctest::Approx(2.0 * res.per_class_error[0]));
        // frozen reference: Phi(-sqrt(2)*4/(2*4)) from 40-digit arithmetic
        CHECK(res.per_class_error[0] == doctest::Approx(0.23975006109347673).epsilon(1e-12));
    }

    SUBCASE("the factor-3 variant reproduces the published numbers") {
        CHECK(res.intermediates.at("acc0_as_printed") ==
              doctest::Approx(0.98305257323765536).epsilon(1e-12));
        CHECK(res.intermediates.at("acc1_as_printed") ==
              doctest::Approx(0.96610514647531071).epsilon(1e-12));
        CHECK_FALSE(res.note.empty());
    }

    SUBCASE("vanishing sigma approaches perfect accuracy") {
        auto sharp = bayes_three_class(GaussianTaskSpec::three_class(2, 4.0, 1e-3));
        for (double e : sharp.per_class_error) CHECK(e < 1e-12);
    }

    SUBCASE("decision regions partition every sample") {
        RngStream rng(62, stream_tag("oracle"));
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> x{20.0 * (rng.next_uniform() - 0.5),
                                  20.0 * (rng.next_uniform() - 0.5)};
            int c = res.classifier.predict(x);
            CHECK(c >= 0);
            CHECK(c <= 2);
        }
    }

    SUBCASE("Monte Carlo confirms the factor-1 errors") {
        RngStream rng(63, stream_tag("oracle-mc"));
        auto mc = monte_carlo_error(res.classifier, spec, 1000000, rng);
        for (int c = 0; c < 3; ++c) {
            CAPTURE(c);
            CHECK(std::abs(mc[c] - res.per_class_error[c]) < 0.002);
        }
    }
}

TEST_CASE("mixed task closed form") {
    SUBCASE("closed form matches the independent numeric minimizer") {
        for (double K : {1.5, 2.0, 3.0, 5.0})
            for (double V : {1.0, 2.0, 5.0, 10.0}) {
                CAPTURE(K); CAPTURE(V);
                auto res = optimal_mixed(GaussianTaskSpec::mixed_prop_var(2, 5.0, 1.0, K, V));
                CHECK(std::abs(res.intermediates.at("b_closed") -
                               res.intermediates.at("b_numeric")) <= 1e-6);
                CHECK(std::abs(res.per_class_error[0] -
                               res.intermediates.at("err_plus_numeric")) <= 1e-8);
                CHECK(std::abs(res.per_class_error[1] -
                               res.intermediates.at("err_minus_numeric")) <= 1e-8);
            }
    }

    SUBCASE("K = V equalizes the class errors") {
        for (double KV : {2.0, 3.0, 7.0}) {
            auto res = optimal_mixed(GaussianTaskSpec::mixed_prop_var(3, 1.0, 1.0, KV, KV));
            CHECK(std::abs(res.per_class_error[0] - res.per_class_error[1]) <= 1e-12);
        }
    }

    SUBCASE("K = 1, V = 1 is fully symmetric") {
        auto res = optimal_mixed(GaussianTaskSpec::mixed_prop_var(2, 1.0, 1.0, 1.0, 1.0));
        CHECK(res.intermediates.at("b_closed") == doctest::Approx(0.0));
        CHECK(res.gap <= 1e-12);
    }

    SUBCASE("proportion-only branch equals the K -> 1 limit") {
        for (double V : {2.0, 5.0, 10.0}) {
            auto branch = mixed_closed_form(GaussianTaskSpec::mixed_prop_var(2, 1.0, 1.0, 1.0, V));
            auto near = mixed_closed_form(
                GaussianTaskSpec::mixed_prop_var(2, 1.0, 1.0, 1.0 + 1e-5, V));
            CHECK(std::abs(branch.b - near.b) <= 1e-4);
        }
    }

    SUBCASE("V-weighted objective is minimized at the closed-form b") {
        auto spec = GaussianTaskSpec::mixed_prop_var(2, 1.2, 1.0, 3.0, 2.0);
        auto cf = mixed_closed_form(spec);
        double e0 = mixed_weighted_error(spec, cf.b);
        for (double db : {-0.01, 0.01, -0.1, 0.1})
            CHECK(e0 <= mixed_weighted_error(spec, cf.b + db));
    }

    SUBCASE("Monte Carlo confirms the closed-form errors") {
        auto spec = GaussianTaskSpec::mixed_prop_var(2, 1.2, 1.0, 3.0, 2.0);
        auto res = optimal_mixed(spec);
        RngStream rng(64, stream_tag("oracle-mc"));
        auto mc = monte_carlo_error(res.classifier, spec, 1000000, rng);
        CHECK(std::abs(mc[0] - res.per_class_error[0]) < 0.002);
        CHECK(std::abs(mc[1] - res.per_class_error[1]) < 0.002);
    }

    SUBCASE("parameters without an interior optimum are rejected") {
        CHECK_THROWS_AS(mixed_closed_form(GaussianTaskSpec::mixed_prop_var(5, 1.0, 1.0, 5.0, 10.0)),
                        std::domain_error);
    }
}

TEST_CASE("corollary grid properties") {
    GaussianTaskSpec base = GaussianTaskSpec::mixed_prop_var(2, 5.0, 1.0, 2.0, 1.0);
    std::vector<double> Ks{1.5, 2.0, 3.0, 5.0};
    std::vector<double> Vs{1.0, 2.0, 5.0, 10.0};
    GapGrid grid = corollary_grid(Ks, Vs, base);

    SUBCASE("diagonal K = V vanishes") {
        for (std::size_t i = 0; i < Ks.size(); ++i)
            for (std::size_t j = 0; j < Vs.size(); ++j)
                if (Ks[i] == Vs[j]) CHECK(grid.gaps(i, j) <= 1e-10);
    }

    SUBCASE("fixed K: decreasing in V below K, increasing above") {
        for (std::size_t i = 0; i < Ks.size(); ++i)
            for (std::size_t j = 0; j + 1 < Vs.size(); ++j) {
                CAPTURE(Ks[i]); CAPTURE(Vs[j]);
                if (Vs[j] < Ks[i] && Vs[j + 1] <= Ks[i])
                    CHECK(grid.gaps(i, j) >= grid.gaps(i, j + 1));
                if (Vs[j] >= Ks[i] && Vs[j + 1] > Ks[i])
                    CHECK(grid.gaps(i, j) <= grid.gaps(i, j + 1));
            }
    }

    SUBCASE("fixed V: increasing in K above V, single peak below") {
        for (std::size_t j = 0; j < Vs.size(); ++j) {
            for (std::size_t i = 0; i + 1 < Ks.size(); ++i)
                if (Ks[i] >= Vs[j]) CHECK(grid.gaps(i, j) <= grid.gaps(i + 1, j));
            // below V the gap rises then falls: no valley allowed
            bool falling = false;
            for (std::size_t i = 0; i + 1 < Ks.size(); ++i) {
                if (Ks[i + 1] > Vs[j]) break;
                if (grid.gaps(i + 1, j) < grid.gaps(i, j)) falling = true;
                else CHECK_FALSE(falling);
            }
        }
    }

    SUBCASE("largest gap sits at V ~ 1 with the largest K") {
        double best = 0.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < Ks.size(); ++i)
            for (std::size_t j = 0; j < Vs.size(); ++j)
                if (grid.gaps(i, j) > best) {
                    best = grid.gaps(i, j);
                    bi = i; bj = j;
                }
        CHECK(Ks[bi] == 5.0);
        CHECK(Vs[bj] == 1.0);
    }
}

TEST_CASE("sub-cluster gap analysis") {
    auto spec = GaussianTaskSpec::local_two_cluster(1.0, 0.5);
    std::vector<double> alphas{0.05, 0.1, 0.2, 0.3, 0.45};
    auto rows = local_gap(spec, alphas);

    SUBCASE("gap is non-increasing in alpha with zero violations") {
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            CAPTURE(rows[i].alpha);
            CHECK(rows[i].gap >= rows[i + 1].gap);
        }
        CHECK(rows.front().gap > rows.back().gap);
    }

    SUBCASE("a balanced split still leaves a positive gap") {
        auto r = local_gap(spec, {0.5});
        CHECK(r[0].gap > 0.0);
        CHECK(r[0].err_near > r[0].err_far);
    }

    SUBCASE("vanishing alpha concentrates the mixture error on the far cluster") {
        auto r = local_gap(spec, {1e-4});
        double mix = 1e-4 * r[0].err_near + (1.0 - 1e-4) * r[0].err_far;
        CHECK(mix == doctest::Approx(r[0].err_far).epsilon(0.05));
    }

    SUBCASE("alpha outside (0,1) rejected") {
        CHECK_THROWS_AS(local_gap(spec, {0.0}), std::invalid_argument);
    }
}

TEST_CASE("monte_carlo_error sanity") {
    SUBCASE("degenerate threshold kills one class") {
        auto spec = GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 2.0);
        LinearClassifier clf;
        clf.w = {1.0, 1.0};
        clf.cuts = {1e6};  // nothing projects above the cut
        RngStream rng(65, stream_tag("oracle-mc"));
        auto err = monte_carlo_error(clf, spec, 20000, rng);
        CHECK(err[0] == doctest::Approx(1.0));
        CHECK(err[1] == doctest::Approx(0.0));
    }

    SUBCASE("analytic errors within five binomial standard errors across specs") {
        int idx = 0;
        for (double K : {1.5, 4.0})
            for (double V : {1.0, 6.0}) {
                auto spec = GaussianTaskSpec::mixed_prop_var(2, 1.5, 1.0, K, V);
                auto res = optimal_mixed(spec);
                RngStream rng(66, stream_tag("oracle-mc"));
                RngStream sub = rng.substream(idx++);
                const std::size_t n = 200000;
                auto mc = monte_carlo_error(res.classifier, spec, n, sub);
                for (int c = 0; c < 2; ++c) {
                    double p = res.per_class_error[c];
                    double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
                    CAPTURE(K); CAPTURE(V); CAPTURE(c);
                    CHECK(std::abs(mc[c] - p) < 5.0 * se + 1e-9);
                }
            }
    }
}
