#ifndef LEXDYN_GRANGER_HPP
#define LEXDYN_GRANGER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lexdyn/dist.hpp"
#include "lexdyn/error.hpp"
#include "lexdyn/ols.hpp"

// Predictive causality between two aligned series: does adding lags of x to
// an autoregression of y reduce the residual sum of squares by more than
// chance? Tested with the nested-model F statistic in both directions.

namespace lexdyn {

enum class LagSelection { Fixed, Bic };

struct GrangerConfig {
    int max_lag = 8;
    LagSelection lag_selection = LagSelection::Bic;
    int fixed_lag = 1;     // used when lag_selection == Fixed
    double alpha = 0.005;
};

struct GrangerResult {
    int lag = 0;
    double f_xy = 0.0, p_xy = 1.0;  // x Granger-causes y
    double f_yx = 0.0, p_yx = 1.0;  // y Granger-causes x
    int n_obs = 0;                  // effective sample after lagging
};

/// d(i) = x(i+lag) - x(i); output is `lag` shorter than the input.
inline std::vector<double> difference(std::span<const double> x, int lag = 1) {
    if (lag < 1) throw std::invalid_argument("difference: lag must be >= 1");
    if (x.size() <= std::size_t(lag))
        throw NumericError("difference: series length " + std::to_string(x.size()) +
                           " <= lag " + std::to_string(lag));
    std::vector<double> d(x.size() - std::size_t(lag));
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i + std::size_t(lag)] - x[i];
    return d;
}

struct FTest {
    double f = 0.0;
    double p = 1.0;
};

namespace detail {

// Rows t = first..T-1; columns [1, y-lags 1..k, x-lags 1..k] when interleave
// is false, [1, y1, x1, y2, x2, ...] when true. The restricted model is a
// column prefix in the first layout; every lag order is a prefix in the
// second.
inline DesignMatrix lagged_design(std::span<const double> x, std::span<const double> y,
                                  int k, std::size_t first, bool interleave) {
    const std::size_t rows = y.size() - first;
    DesignMatrix d(rows, 1 + 2 * std::size_t(k));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        d(r, 0) = 1.0;
        for (int j = 1; j <= k; ++j) {
            if (interleave) {
                d(r, std::size_t(2 * j - 1)) = y[t - std::size_t(j)];
                d(r, std::size_t(2 * j)) = x[t - std::size_t(j)];
            } else {
                d(r, std::size_t(j)) = y[t - std::size_t(j)];
                d(r, std::size_t(k + j)) = x[t - std::size_t(j)];
            }
        }
    }
    return d;
}

}  // namespace detail

/// F test of "x Granger-causes y" at lag order k. Restricted model: y on its
/// own k lags; full model adds k lags of x. Both come off one factorization.
inline FTest granger_test(std::span<const double> x, std::span<const double> y, int k) {
    if (x.size() != y.size())
        throw std::invalid_argument("granger_test: series lengths differ");
    if (k < 1) throw std::invalid_argument("granger_test: lag must be >= 1");
    const std::size_t t_len = y.size();
    const int df2 = int(t_len) - 3 * k - 1;  // (T - k) obs minus (2k+1) params
    if (df2 <= 0)
        throw NumericError("granger_test: series too short (" + std::to_string(t_len) +
                           ") for lag " + std::to_string(k));

    const DesignMatrix d = detail::lagged_design(x, y, k, std::size_t(k), false);
    std::span<const double> target = y.subspan(std::size_t(k));
    QrLs qr(d, target);
    if (!qr.prefix_full_rank(d.cols())) {
        // surface the rank error with column indices
        qr.solve();
    }
    const double rss_r = qr.prefix_rss(1 + std::size_t(k));
    const double rss_f = qr.rss();

    double mean = 0.0;
    for (double v : target) mean += v;
    mean /= double(target.size());
    double tss = 0.0;
    for (double v : target) tss += (v - mean) * (v - mean);
    const double tol = 1e-14 * std::max(tss, 1e-300);

    FTest out;
    const double num = std::max(0.0, rss_r - rss_f);
    if (rss_f <= tol) {
        if (num <= tol) {  // nothing left to explain and nothing added
            out.f = 0.0;
            out.p = 1.0;
        } else {  // perfect prediction once x enters
            out.f = std::numeric_limits<double>::infinity();
            out.p = 0.0;
        }
        return out;
    }
    out.f = (num / double(k)) / (rss_f / double(df2));
    out.p = f_sf(out.f, double(k), double(df2));
    return out;
}

/// BIC lag order for a pure autoregression of one series, candidates scored
/// on the common sample t = max_lag..T-1. Used for the shared lag order of
/// the bidirectional test: selecting on own lags only keeps the selection
/// independent of the cross terms the F test then judges, so the test's
/// size survives the selection step.
inline int select_lag_ar(std::span<const double> y, int max_lag) {
    if (max_lag < 1) throw std::invalid_argument("select_lag_ar: max_lag must be >= 1");
    const std::size_t rows =
        y.size() > std::size_t(max_lag) ? y.size() - std::size_t(max_lag) : 0;
    if (rows < std::size_t(max_lag + 2))
        throw NumericError("select_lag_ar: series too short for max_lag " +
                           std::to_string(max_lag));
    DesignMatrix d(rows, 1 + std::size_t(max_lag));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = std::size_t(max_lag) + r;
        d(r, 0) = 1.0;
        for (int j = 1; j <= max_lag; ++j) d(r, std::size_t(j)) = y[t - std::size_t(j)];
    }
    QrLs qr(d, y.subspan(std::size_t(max_lag)));
    const double n = double(rows);
    int best_k = 1;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_lag; ++k) {
        const std::size_t p = 1 + std::size_t(k);
        if (!qr.prefix_full_rank(p)) qr.solve(p);
        const double rss = qr.prefix_rss(p);
        const double bic = n * std::log(std::max(rss / n, 1e-300)) + double(p) * std::log(n);
        if (bic < best_bic) {
            best_bic = bic;
            best_k = k;
        }
    }
    return best_k;
}

/// BIC lag order for the full model of "x explains y", all candidates scored
/// on the common sample t = max_lag..T-1 so they see identical observations.
inline int select_lag(std::span<const double> x, std::span<const double> y, int max_lag) {
    if (x.size() != y.size())
        throw std::invalid_argument("select_lag: series lengths differ");
    if (max_lag < 1) throw std::invalid_argument("select_lag: max_lag must be >= 1");
    const std::size_t rows =
        y.size() > std::size_t(max_lag) ? y.size() - std::size_t(max_lag) : 0;
    if (rows < std::size_t(2 * max_lag + 2))
        throw NumericError("select_lag: series too short for max_lag " + std::to_string(max_lag));

    const DesignMatrix d = detail::lagged_design(x, y, max_lag, std::size_t(max_lag), true);
    QrLs qr(d, y.subspan(std::size_t(max_lag)));
    const double n = double(rows);
    int best_k = 1;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_lag; ++k) {
        const std::size_t p = 1 + 2 * std::size_t(k);
        if (!qr.prefix_full_rank(p)) qr.solve(p);  // throws with column indices
        const double rss = qr.prefix_rss(p);
        const double bic = n * std::log(std::max(rss / n, 1e-300)) + double(p) * std::log(n);
        if (bic < best_bic) {
            best_bic = bic;
            best_k = k;
        }
    }
    return best_k;
}

/// Both directions after lag-1 differencing, at one shared lag order. With
/// BIC selection the order is the larger of the two series' own-lag picks:
/// symmetric under argument swap, and blind to the cross terms under test.
inline GrangerResult bidirectional(std::span<const double> x, std::span<const double> y,
                                   const GrangerConfig& cfg = {}) {
    if (x.size() != y.size())
        throw std::invalid_argument("bidirectional: series lengths differ");
    const std::vector<double> dx = difference(x, 1);
    const std::vector<double> dy = difference(y, 1);

    int k;
    if (cfg.lag_selection == LagSelection::Fixed) {
        if (cfg.fixed_lag < 1) throw std::invalid_argument("bidirectional: fixed_lag must be >= 1");
        k = cfg.fixed_lag;
    } else {
        k = std::max(select_lag_ar(dx, cfg.max_lag), select_lag_ar(dy, cfg.max_lag));
    }

    GrangerResult res;
    res.lag = k;
    const FTest xy = granger_test(dx, dy, k);
    const FTest yx = granger_test(dy, dx, k);
    res.f_xy = xy.f;
    res.p_xy = xy.p;
    res.f_yx = yx.f;
    res.p_yx = yx.p;
    res.n_obs = int(dx.size()) - k;
    return res;
}

}  // namespace lexdyn

#endif
