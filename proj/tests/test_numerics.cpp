#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "imblab/matrix.hpp"
#include "imblab/normal.hpp"
#include "imblab/rng.hpp"
#include "imblab/stats.hpp"
#include "imblab/task.hpp"

using namespace imblab;

namespace {

// reference values computed with 40-digit arithmetic (mpmath erfc)
struct CdfRef {
    double x, phi;
};
constexpr CdfRef kCdfTable[] = {
    {0, 0.5},
    {0.1, 0.5398278372770289814654},
    {-0.1, 0.4601721627229710185346},
    {0.5, 0.6914624612740131036377},
    {-0.5, 0.3085375387259868963623},
    {1, 0.8413447460685429485852},
    {-1, 0.1586552539314570514148},
    {1.2345678, 0.8915043004722419969974},
    {-1.959964, 0.0249999990964424043025},
    {1.959964, 0.9750000009035575956975},
    {2, 0.9772498680518207927997},
    {-2, 0.02275013194817920720028},
    {3, 0.9986501019683699054733},
    {-3, 0.001349898031630094526652},
    {-4.5, 0.000003397673124730060401687},
    {5, 0.9999997133484281208061},
    {-5, 2.866515718791939116738e-7},
    {-6.789, 5.645672083592259103373e-12},
    {8, 0.9999999999999993779039},
    {-8, 6.220960574271784123516e-16},
    {-10, 7.619853024160526065973e-24},
    {-15, 3.670966199312750885786e-51},
    {-20, 2.753624118606233695076e-89},
    {-30, 4.906713927148187059534e-198},
    {0.46875, 0.6803758284828823739631},
    {-0.46875, 0.3196241715171176260369},
    {4, 0.9999683287581668800787},
    {-4, 0.00003167124183311992125377},
};

}  // namespace

TEST_CASE("std_normal_cdf matches high-precision reference") {
    for (const auto& ref : kCdfTable) {
        CAPTURE(ref.x);
        CHECK(std::abs(std_normal_cdf(ref.x) - ref.phi) <= 1e-10);
        // relative accuracy in the far tail
        if (ref.phi > 0 && ref.phi < 0.5)
            CHECK(std::abs(std_normal_cdf(ref.x) - ref.phi) / ref.phi <= 1e-12);
    }
    CHECK(std_normal_cdf(-1.959964) == doctest::Approx(0.025).epsilon(1e-6 / 0.025));
}

TEST_CASE("std_normal_cdf is monotone on a dense grid") {
    double prev = std_normal_cdf(-8.0);
    for (int i = 1; i < 10000; ++i) {
        double x = -8.0 + 16.0 * i / 9999.0;
        double v = std_normal_cdf(x);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("std_normal_cdf symmetry identity") {
    for (double x : {0.0, 0.3, 1.7, 2.9, 4.2, 7.5}) {
        CHECK(std_normal_cdf(x) + std_normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("RngStream determinism and substreams") {
    RngStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42), d(43);
    bool differs = false;
    for (int i = 0; i < 10; ++i) differs = differs || (c.next_u64() != d.next_u64());
    CHECK(differs);

    RngStream base(7);
    RngStream s1 = base.substream(1), s1b = base.substream(1), s2 = base.substream(2);
    CHECK(s1.next_u64() == s1b.next_u64());
    CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("sample_mvn empirical moments") {
    const std::size_t n = 1000000;
    RngStream rng(123, stream_tag("test"));

    SUBCASE("standard normal, mean within 4 sigma / sqrt(n)") {
        std::vector<double> mean{0.0, 0.0};
        DenseMatrix cov = DenseMatrix::identity(2);
        DenseMatrix x = sample_mvn(mean, cov, n, rng);
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += x(i, j);
            CHECK(std::abs(s / n) < 4.0 / std::sqrt(static_cast<double>(n)));
        }
    }

    SUBCASE("variance 16, chi-square style interval") {
        std::vector<double> mean{4.0, 4.0};
        DenseMatrix cov = DenseMatrix::identity(2, 16.0);
        DenseMatrix x = sample_mvn(mean, cov, n, rng);
        for (int j = 0; j < 2; ++j) {
            double s = 0.0, s2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += x(i, j);
                s2 += x(i, j) * x(i, j);
            }
            double m = s / n;
            double var = s2 / n - m * m;
            CHECK(std::abs(var - 16.0) < 0.3);
        }
    }

    SUBCASE("correlated covariance is reproduced") {
        std::vector<double> mean{0.0, 0.0};
        DenseMatrix cov(2, 2);
        cov(0, 0) = 2.0; cov(0, 1) = 1.2; cov(1, 0) = 1.2; cov(1, 1) = 3.0;
        DenseMatrix x = sample_mvn(mean, cov, 200000, rng);
        double sxy = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) sxy += x(i, 0) * x(i, 1);
        CHECK(sxy / static_cast<double>(x.rows()) == doctest::Approx(1.2).epsilon(0.05));
    }
}

TEST_CASE("sample_mvn degenerate and error cases") {
    RngStream rng(1);
    std::vector<double> mean{0.0, 0.0, 0.0};

    SUBCASE("n = 0 keeps the column count") {
        DenseMatrix x = sample_mvn(mean, DenseMatrix::identity(3), 0, rng);
        CHECK(x.rows() == 0);
        CHECK(x.cols() == 3);
    }

    SUBCASE("non-PSD covariance is rejected") {
        DenseMatrix bad = DenseMatrix::identity(3);
        bad(0, 0) = -1.0;
        CHECK_THROWS_AS(sample_mvn(mean, bad, 10, rng), std::invalid_argument);
    }

    SUBCASE("zero covariance is a valid PSD boundary") {
        DenseMatrix zero(3, 3);
        DenseMatrix x = sample_mvn(mean, zero, 5, rng);
        for (std::size_t i = 0; i < 5; ++i)
            for (int j = 0; j < 3; ++j) CHECK(x(i, j) == 0.0);
    }
}

TEST_CASE("sample_mvn z-score property over seeds") {
    // seeded property test: standardized empirical means stay within +/-5
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        RngStream rng(seed, stream_tag("prop"));
        const std::size_t n = 100000;
        std::vector<double> mean{1.0, -2.0};
        DenseMatrix cov = DenseMatrix::identity(2, 4.0);
        DenseMatrix x = sample_mvn(mean, cov, n, rng);
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += x(i, j);
            double z = (s / n - mean[j]) / (2.0 / std::sqrt(static_cast<double>(n)));
            CHECK(std::abs(z) < 5.0);
        }
    }
}

TEST_CASE("sample_mvn bitwise determinism") {
    std::vector<double> mean{0.5, -0.5};
    DenseMatrix cov = DenseMatrix::identity(2, 2.0);
    RngStream r1(99, stream_tag("det")), r2(99, stream_tag("det"));
    DenseMatrix a = sample_mvn(mean, cov, 1000, r1);
    DenseMatrix b = sample_mvn(mean, cov, 1000, r2);
    CHECK(a == b);
}

TEST_CASE("estimate_class_stats basics") {
    SUBCASE("balanced split proportions") {
        Dataset ds;
        ds.features = DenseMatrix(4, 1);
        ds.features(0, 0) = 0.0; ds.features(1, 0) = 1.0;
        ds.features(2, 0) = 10.0; ds.features(3, 0) = 11.0;
        ds.labels = {0, 0, 1, 1};
        auto stats = estimate_class_stats(ds);
        CHECK(stats[0].proportion == doctest::Approx(0.5));
        CHECK(stats[1].proportion == doctest::Approx(0.5));
        CHECK(stats[0].mean[0] == doctest::Approx(0.5));
        CHECK(stats[1].mean[0] == doctest::Approx(10.5));
    }

    SUBCASE("proportions sum to one within 1e-12 and covariances stay symmetric") {
        RngStream rng(5, stream_tag("stats"));
        auto spec = GaussianTaskSpec::long_tail(5, 6, 1.0, 1.0, 20.0);
        Dataset ds = generate(spec, 2000, rng, SampleMode::Total);
        auto stats = estimate_class_stats(ds);
        double total = 0.0;
        for (const auto& s : stats) {
            total += s.proportion;
            CHECK(s.cov.is_symmetric(1e-9));
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }

    SUBCASE("variance-imbalanced task recovered within 5%") {
        RngStream rng(7, stream_tag("stats"));
        auto spec = GaussianTaskSpec::binary_variance(2, 1.0, 1.0, 2.0);
        Dataset ds = generate(spec, 100000, rng, SampleMode::PerClass);
        auto stats = estimate_class_stats(ds);
        for (int j = 0; j < 2; ++j) {
            CHECK(stats[0].cov(j, j) == doctest::Approx(4.0).epsilon(0.05));
            CHECK(stats[1].cov(j, j) == doctest::Approx(1.0).epsilon(0.05));
        }
    }

    SUBCASE("singleton class gets the shrinkage diagonal") {
        Dataset ds;
        ds.features = DenseMatrix(3, 2);
        ds.features(0, 0) = 1.0;
        ds.features(1, 0) = 2.0;
        ds.features(2, 0) = 5.0;
        ds.labels = {0, 0, 1};
        auto stats = estimate_class_stats(ds);
        CHECK(stats[1].cov(0, 0) == doctest::Approx(1e-6));
        CHECK(stats[1].cov(1, 1) == doctest::Approx(1e-6));
        CHECK(stats[1].cov(0, 1) == 0.0);
    }

    SUBCASE("errors: empty dataset and label gaps") {
        Dataset empty;
        empty.features = DenseMatrix(0, 2);
        CHECK_THROWS_AS(estimate_class_stats(empty), std::invalid_argument);

        Dataset gap;
        gap.features = DenseMatrix(2, 1);
        gap.labels = {0, 2};  // class 1 missing
        CHECK_THROWS_AS(estimate_class_stats(gap), std::invalid_argument);
    }
}

TEST_CASE("cholesky_psd factorization round trip") {
    DenseMatrix a(3, 3);
    double vals[3][3] = {{4, 2, 0.4}, {2, 3, 0.2}, {0.4, 0.2, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = vals[i][j];
    DenseMatrix l = cholesky_psd(a);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += l(i, k) * l(j, k);
            CHECK(s == doctest::Approx(a(i, j)).epsilon(1e-12));
        }
}
