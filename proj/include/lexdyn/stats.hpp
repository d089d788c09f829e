#ifndef LEXDYN_STATS_HPP
#define LEXDYN_STATS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lexdyn/dist.hpp"
#include "lexdyn/error.hpp"
#include "lexdyn/ols.hpp"

namespace lexdyn {

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
    int n = 0;
};

/// Product-moment correlation with a two-sided p via the t transform.
inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: series lengths differ");
    const std::size_t n = x.size();
    if (n < 3) throw NumericError("pearson: need at least 3 observations");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw NumericError("pearson: correlation undefined for a constant series");
    PearsonResult res;
    res.n = int(n);
    res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = double(n - 2);
    if (std::fabs(res.r) >= 1.0) {
        res.p = 0.0;
    } else {
        const double t = res.r * std::sqrt(df / (1.0 - res.r * res.r));
        res.p = t_sf_two_sided(t, df);
    }
    return res;
}

inline double fisher_z(double r) {
    if (!(std::fabs(r) < 1.0))
        throw NumericError("fisher_z: |r| must be < 1, got " + std::to_string(r));
    return std::atanh(r);
}

inline double fisher_z_inv(double z) { return std::tanh(z); }

/// Average of correlations through Fisher's Z so the mean is taken on an
/// (approximately) normal scale.
inline double mean_r(std::span<const double> rs) {
    if (rs.empty()) throw NumericError("mean_r: empty correlation list");
    double acc = 0.0;
    for (double r : rs) acc += fisher_z(r);
    return fisher_z_inv(acc / double(rs.size()));
}

struct TTestResult {
    double t = 0.0;
    int df = 0;
    double p = 1.0;
};

inline TTestResult one_sample_t(std::span<const double> values, double mu0) {
    const std::size_t n = values.size();
    if (n < 2) throw NumericError("one_sample_t: need at least 2 observations");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= double(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    if (ss <= 0.0) throw NumericError("one_sample_t: zero sample variance");
    const double sd = std::sqrt(ss / double(n - 1));
    TTestResult res;
    res.t = (mean - mu0) / (sd / std::sqrt(double(n)));
    res.df = int(n) - 1;
    res.p = t_sf_two_sided(res.t, double(res.df));
    return res;
}

struct ShapiroResult {
    double w = 1.0;
    double p = 1.0;
};

/// Shapiro-Wilk W test of normality, Royston (1995) approximation AS R94.
/// Valid for 3 <= n <= 5000.
inline ShapiroResult shapiro_wilk(std::span<const double> values) {
    const int n = int(values.size());
    if (n < 3 || n > 5000)
        throw NumericError("shapiro_wilk: n must lie in [3, 5000], got " + std::to_string(n));
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    if (x.back() - x.front() <= 0.0)
        throw NumericError("shapiro_wilk: sample has zero range");

    const auto poly = [](const double* c, int m, double v) {
        double acc = 0.0;
        for (int i = m; i-- > 0;) acc = acc * v + c[i];
        return acc;
    };
    // AS R94 polynomial coefficients (ascending order)
    static const double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static const double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static const double c3[4] = {0.5440, -0.39978, 0.025054, -6.714e-4};
    static const double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static const double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static const double c6[3] = {-0.4803, -0.082676, 0.0030302};

    const int nn2 = n / 2;
    std::vector<double> weights(nn2);  // upper-half coefficients, positive
    if (n == 3) {
        weights[0] = 0.70710678118654752440;
    } else {
        const double an = double(n);
        std::vector<double> m(nn2);
        double summ2 = 0.0;
        for (int i = 0; i < nn2; ++i) {
            m[i] = normal_quantile((double(i + 1) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, 6, rsn) - m[0] / ssumm2;
        int i1;
        double fac;
        if (n > 5) {
            i1 = 2;
            const double a2 = -m[1] / ssumm2 + poly(c2, 6, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            weights[1] = a2;
        } else {
            i1 = 1;
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        }
        weights[0] = a1;
        for (int i = i1; i < nn2; ++i) weights[i] = -m[i] / fac;
    }

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(n);
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);
    double sax = 0.0;
    for (int i = 0; i < nn2; ++i) sax += weights[i] * (x[std::size_t(n - 1 - i)] - x[std::size_t(i)]);

    ShapiroResult res;
    res.w = std::min(1.0, (sax * sax) / ssq);
    const double w1 = 1.0 - res.w;
    if (w1 < 1e-15) {
        res.p = 1.0;
        return res;
    }

    if (n == 3) {
        const double pi6 = 1.90985931710274;   // 6/pi
        const double stqr = 1.04719755119660;  // asin(sqrt(3/4))
        res.p = std::clamp(pi6 * (std::asin(std::sqrt(res.w)) - stqr), 0.0, 1.0);
        return res;
    }
    const double y = std::log(w1);
    double z;
    if (n <= 11) {
        const double an = double(n);
        const double gamma = -2.273 + 0.459 * an;
        if (y >= gamma) {
            res.p = 1e-99;
            return res;
        }
        const double mu = poly(c3, 4, an);
        const double sigma = std::exp(poly(c4, 4, an));
        z = (-std::log(gamma - y) - mu) / sigma;
    } else {
        const double ln_n = std::log(double(n));
        const double mu = poly(c5, 4, ln_n);
        const double sigma = std::exp(poly(c6, 3, ln_n));
        z = (y - mu) / sigma;
    }
    res.p = normal_sf(z);
    return res;
}

struct GroupRegressionResult {
    double beta_group = 0.0;       // article-dummy coefficient (advertisement baseline)
    double se_beta = 0.0;
    double f_stat = 0.0;           // vs. the constant model
    double chi2_vs_constant = 0.0; // likelihood-ratio chi-square, 1 df
    double p = 1.0;
};

/// OLS of a response on intercept + group dummy. `group_b` holds 0/1 flags
/// marking the observations in the non-baseline group.
inline GroupRegressionResult group_regression(std::span<const double> response,
                                              std::span<const unsigned char> group_b) {
    if (response.size() != group_b.size())
        throw std::invalid_argument("group_regression: length mismatch");
    const std::size_t n = response.size();
    std::size_t nb = 0;
    for (unsigned char g : group_b) nb += g ? 1 : 0;
    if (nb == 0 || nb == n) throw NumericError("group_regression: a group is empty");
    if (n < 3) throw NumericError("group_regression: need at least 3 observations");

    DesignMatrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = group_b[i] ? 1.0 : 0.0;
    }
    QrLs qr(x, response);
    const std::vector<double> beta = qr.solve();
    const double rss1 = qr.rss();
    const double rss0 = qr.prefix_rss(1);  // constant model
    const int df = int(n) - 2;
    const double sigma2 = rss1 / double(df);
    const std::vector<double> se = qr.coef_se(sigma2);

    GroupRegressionResult res;
    res.beta_group = beta[1];
    res.se_beta = se[1];
    if (rss1 <= 0.0) {
        res.f_stat = rss0 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        res.p = rss0 > 0.0 ? 0.0 : 1.0;
        res.chi2_vs_constant = res.f_stat;
        return res;
    }
    res.f_stat = std::max(0.0, rss0 - rss1) / sigma2;
    res.chi2_vs_constant = double(n) * std::log(rss0 / rss1);
    res.p = f_sf(res.f_stat, 1.0, double(df));
    return res;
}

struct CorrelationSummary {
    struct Entry {
        std::string keyword;
        double r = 0.0;
        double p = 1.0;
        int n = 0;
    };
    std::vector<Entry> pairwise;
    double mean_r = 0.0;           // Fisher-Z average
    double prop_significant = 0.0; // fraction with p < alpha
};

inline CorrelationSummary summarize_correlations(std::vector<CorrelationSummary::Entry> entries,
                                                 double alpha) {
    if (entries.empty()) throw NumericError("summarize_correlations: no entries");
    CorrelationSummary s;
    std::vector<double> rs;
    std::size_t sig = 0;
    for (const auto& e : entries) {
        if (std::fabs(e.r) < 1.0) rs.push_back(e.r);
        if (e.p < alpha) ++sig;
    }
    s.mean_r = rs.empty() ? 0.0 : mean_r(rs);
    s.prop_significant = double(sig) / double(entries.size());
    s.pairwise = std::move(entries);
    return s;
}

}  // namespace lexdyn

#endif
