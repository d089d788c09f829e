#include <doctest.h>

#include <cmath>

#include "lexdyn/rng.hpp"
#include "lexdyn/stats.hpp"

using namespace lexdyn;

TEST_CASE("pearson on exact relations") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> minus(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) minus[i] = -x[i];
    CHECK(pearson(x, x).r == doctest::Approx(1.0));
    CHECK(pearson(x, minus).r == doctest::Approx(-1.0));

    const std::vector<double> a = {1, 0, -1, 0};
    const std::vector<double> b = {0, 1, 0, -1};
    CHECK(pearson(a, b).r == doctest::Approx(0.0));

    const std::vector<double> constant = {2, 2, 2, 2};
    CHECK_THROWS_AS(pearson(constant, a), NumericError);
}

TEST_CASE("pearson is invariant under positive affine transforms") {
    Rng rng(4);
    std::vector<double> x(50), y(50), x2(50), y2(50);
    for (std::size_t i = 0; i < 50; ++i) {
        x[i] = rng.normal();
        y[i] = 0.5 * x[i] + rng.normal();
        x2[i] = 3.0 * x[i] + 1.0;
        y2[i] = 0.25 * y[i] - 7.0;
    }
    const PearsonResult a = pearson(x, y);
    const PearsonResult b = pearson(x2, y2);
    CHECK(b.r == doctest::Approx(a.r).epsilon(1e-12));
    CHECK(b.p == doctest::Approx(a.p).epsilon(1e-12));
}

TEST_CASE("fisher z transform and its inverse") {
    CHECK(fisher_z(0.0) == 0.0);
    CHECK(fisher_z(0.5) == doctest::Approx(0.5493061443340549).epsilon(1e-14));
    for (double r : {-0.95, -0.5, -0.1, 0.0, 0.3, 0.77, 0.999})
        CHECK(fisher_z_inv(fisher_z(r)) == doctest::Approx(r).epsilon(1e-12));
    // odd and strictly increasing
    CHECK(fisher_z(-0.4) == doctest::Approx(-fisher_z(0.4)).epsilon(1e-14));
    CHECK(fisher_z(0.6) > fisher_z(0.5));
    CHECK_THROWS_AS(fisher_z(1.0), NumericError);
    CHECK_THROWS_AS(fisher_z(-1.2), NumericError);
}

TEST_CASE("mean_r averages on the z scale") {
    const std::vector<double> single = {0.3};
    CHECK(mean_r(single) == doctest::Approx(0.3).epsilon(1e-14));

    const std::vector<double> opposite = {0.62, -0.62};
    CHECK(mean_r(opposite) == doctest::Approx(0.0).epsilon(1e-14));

    // tanh((atanh .2 + atanh .6)/2)
    const std::vector<double> pair = {0.2, 0.6};
    CHECK(mean_r(pair) == doctest::Approx(0.4202041028867287).epsilon(1e-12));

    const std::vector<double> empty;
    CHECK_THROWS_AS(mean_r(empty), NumericError);
}

TEST_CASE("one-sample t against a reference value") {
    const std::vector<double> v = {0.6, 0.7, 0.8};
    const TTestResult r = one_sample_t(v, 0.5);
    CHECK(r.t == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));  // 3.4641...
    CHECK(r.df == 2);

    const std::vector<double> centered = {0.4, 0.5, 0.6};
    CHECK(one_sample_t(centered, 0.5).t == doctest::Approx(0.0));

    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS(one_sample_t(one, 0.0), NumericError);
    const std::vector<double> flat = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(one_sample_t(flat, 0.0), NumericError);
}

TEST_CASE("shapiro-wilk contract and frozen values") {
    std::vector<double> too_small = {1.0, 2.0};
    CHECK_THROWS_AS(shapiro_wilk(too_small), NumericError);
    std::vector<double> flat(10, 3.0);
    CHECK_THROWS_AS(shapiro_wilk(flat), NumericError);

    // values from tests/fixtures/pvalues.csv (scipy.stats.shapiro, AS R94)
    const std::vector<double> heights = {148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236};
    const ShapiroResult r = shapiro_wilk(heights);
    CHECK(r.w == doctest::Approx(0.7888146948631716).epsilon(1e-8));
    CHECK(r.p == doctest::Approx(0.006703814061898823).epsilon(1e-6));
    CHECK(r.w > 0.0);
    CHECK(r.w <= 1.0);
}

TEST_CASE("shapiro-wilk calibration on normal and exponential samples") {
    Rng rng(42);
    int reject_normal = 0, reject_expo = 0;
    const int seeds = 120;
    const int n = 500;
    for (int s = 0; s < seeds; ++s) {
        std::vector<double> normal(n), expo(n);
        for (int i = 0; i < n; ++i) {
            normal[std::size_t(i)] = rng.normal();
            expo[std::size_t(i)] = -std::log(rng.uniform());
        }
        if (shapiro_wilk(normal).p < 0.05) ++reject_normal;
        if (shapiro_wilk(expo).p < 0.005) ++reject_expo;
    }
    // normal: near-nominal rejection at 5%; exponential: essentially always
    CHECK(reject_normal <= 15);
    CHECK(reject_expo >= seeds - 1);
}

TEST_CASE("group regression recovers a pure shift and its F = t^2 identity") {
    std::vector<double> h;
    std::vector<unsigned char> is_article;
    Rng rng(5);
    std::vector<double> base(40);
    for (auto& v : base) v = 1.0 + 0.2 * rng.normal();
    const double delta = -0.21;
    for (double v : base) {
        h.push_back(v);
        is_article.push_back(0);
    }
    for (double v : base) {
        h.push_back(v + delta);
        is_article.push_back(1);
    }
    const GroupRegressionResult r = group_regression(h, is_article);
    CHECK(r.beta_group == doctest::Approx(delta).epsilon(1e-10));
    const double t = r.beta_group / r.se_beta;
    CHECK(r.f_stat == doctest::Approx(t * t).epsilon(1e-9));
    CHECK(r.p < 1e-3);
    CHECK(r.chi2_vs_constant > 0.0);

    // identical groups: beta 0, p 1
    std::vector<double> same;
    std::vector<unsigned char> flags;
    for (double v : base) {
        same.push_back(v);
        flags.push_back(0);
        same.push_back(v);
        flags.push_back(1);
    }
    const GroupRegressionResult r0 = group_regression(same, flags);
    CHECK(r0.beta_group == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r0.p == doctest::Approx(1.0).epsilon(1e-6));

    std::vector<double> solo = {1.0, 2.0};
    std::vector<unsigned char> one_group = {1, 1};
    CHECK_THROWS_AS(group_regression(solo, one_group), NumericError);
}

TEST_CASE("correlation summary aggregates r values and significance") {
    std::vector<CorrelationSummary::Entry> entries = {
        {"a", 0.2, 0.001, 100}, {"b", 0.6, 0.0001, 100}, {"c", -0.1, 0.5, 100}};
    const CorrelationSummary s = summarize_correlations(entries, 0.005);
    CHECK(s.prop_significant == doctest::Approx(2.0 / 3.0));
    // z-average of {0.2, 0.6, -0.1}
    const double expect =
        std::tanh((std::atanh(0.2) + std::atanh(0.6) + std::atanh(-0.1)) / 3.0);
    CHECK(s.mean_r == doctest::Approx(expect).epsilon(1e-12));
    CHECK(s.pairwise.size() == 3);
}
