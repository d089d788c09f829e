#include <doctest.h>

#include <cmath>
#include <random>

#include "lexdyn/dist.hpp"
#include "lexdyn/ols.hpp"

using namespace lexdyn;

TEST_CASE("ols recovers exact linear relations") {
    // y = 2x with intercept+x design -> coefficients (0, 2), RSS 0
    DesignMatrix x(6, 2);
    std::vector<double> y(6);
    for (int i = 0; i < 6; ++i) {
        x(std::size_t(i), 0) = 1.0;
        x(std::size_t(i), 1) = double(i);
        y[std::size_t(i)] = 2.0 * double(i);
    }
    const OlsFit fit = ols(x, y);
    CHECK(fit.coef[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.coef[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.rss == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("intercept-only design fits the mean") {
    DesignMatrix x(5, 1);
    for (int i = 0; i < 5; ++i) x(std::size_t(i), 0) = 1.0;
    const std::vector<double> y = {3.0, 3.0, 3.0, 3.0, 3.0};
    const OlsFit fit = ols(x, y);
    CHECK(fit.coef[0] == doctest::Approx(3.0));
    CHECK(fit.rss == doctest::Approx(0.0));
}

TEST_CASE("nested models never increase RSS and prefixes match sub-fits") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    const std::size_t n = 60, p = 5;
    DesignMatrix x(n, p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t j = 1; j < p; ++j) x(i, j) = nd(gen);
        y[i] = nd(gen);
    }
    QrLs qr(x, y);
    double prev = qr.prefix_rss(1);
    for (std::size_t j = 2; j <= p; ++j) {
        const double rss = qr.prefix_rss(j);
        CHECK(rss <= prev + 1e-12);
        prev = rss;
        // the prefix must agree with an independent fit of the truncated design
        DesignMatrix sub(n, j);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < j; ++c) sub(i, c) = x(i, c);
        CHECK(rss == doctest::Approx(ols(sub, y).rss).epsilon(1e-10));
    }
}

TEST_CASE("rank-deficient design names the dependent columns") {
    DesignMatrix x(10, 3);
    std::vector<double> y(10);
    for (int i = 0; i < 10; ++i) {
        x(std::size_t(i), 0) = 1.0;
        x(std::size_t(i), 1) = double(i);
        x(std::size_t(i), 2) = 2.0 * double(i);  // duplicate direction
        y[std::size_t(i)] = double(i);
    }
    try {
        ols(x, y);
        FAIL("expected CollinearError");
    } catch (const CollinearError& e) {
        REQUIRE(e.columns.size() == 1);
        CHECK(e.columns[0] == 2);
    }
}

TEST_CASE("simple regression coefficients and SE match the closed form") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd;
    const std::size_t n = 40;
    DesignMatrix x(n, 2);
    std::vector<double> y(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = nd(gen);
        x(i, 0) = 1.0;
        x(i, 1) = t[i];
        y[i] = 0.7 + 1.3 * t[i] + 0.5 * nd(gen);
    }
    const OlsFit fit = ols(x, y, true);

    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (t[i] - mt) * (t[i] - mt);
        sxy += (t[i] - mt) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mt;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - intercept - slope * t[i];
        rss += r * r;
    }
    const double se_slope = std::sqrt(rss / double(n - 2) / sxx);

    CHECK(fit.coef[0] == doctest::Approx(intercept).epsilon(1e-10));
    CHECK(fit.coef[1] == doctest::Approx(slope).epsilon(1e-10));
    CHECK(fit.rss == doctest::Approx(rss).epsilon(1e-10));
    CHECK(fit.se[1] == doctest::Approx(se_slope).epsilon(1e-10));
}

TEST_CASE("p-value kernels agree with frozen oracle values") {
    // spot values from tests/fixtures/pvalues.csv (mpmath at 50 digits); the
    // acceptance suite checks the whole table
    CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316300945).epsilon(1e-12));
    CHECK(t_sf_two_sided(2.0, 10.0) == doctest::Approx(0.073388034770740366).epsilon(1e-12));
    CHECK(f_sf(5.3, 2.0, 391.0) == doctest::Approx(0.0053565715718650894).epsilon(1e-12));
    CHECK(chisq_sf(3.84, 1.0) == doctest::Approx(0.050043521248705099).epsilon(1e-12));
    CHECK(chisq_sf(149.1, 1.0) == doctest::Approx(2.7269811570272196e-34).epsilon(1e-10));
}

TEST_CASE("t and F tails are consistent: two-sided t^2 equals F(1, df)") {
    for (double t : {0.3, 1.0, 2.5, 6.0})
        for (double df : {4.0, 30.0, 500.0})
            CHECK(t_sf_two_sided(t, df) == doctest::Approx(f_sf(t * t, 1.0, df)).epsilon(1e-12));
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double z : {-6.0, -2.3, -0.5, 0.0, 0.7, 3.1, 5.5})
        CHECK(normal_quantile(normal_cdf(z)) == doctest::Approx(z).epsilon(1e-10));
    CHECK_THROWS_AS(normal_quantile(0.0), NumericError);
    CHECK_THROWS_AS(normal_quantile(1.0), NumericError);
}

TEST_CASE("incomplete beta reflection identity") {
    for (double a : {0.5, 2.0, 40.0})
        for (double b : {0.5, 3.0, 17.0})
            for (double x : {0.05, 0.4, 0.93})
                CHECK(incbeta(a, b, x) ==
                      doctest::Approx(1.0 - incbeta(b, a, 1.0 - x)).epsilon(1e-11));
}

TEST_CASE("F tail edge cases") {
    CHECK(f_sf(0.0, 3.0, 10.0) == 1.0);
    CHECK(f_sf(std::numeric_limits<double>::infinity(), 3.0, 10.0) == 0.0);
}
