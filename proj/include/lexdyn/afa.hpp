#ifndef LEXDYN_AFA_HPP
#define LEXDYN_AFA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexdyn/error.hpp"
#include "lexdyn/ols.hpp"

// Adaptive fractal analysis (Gao et al. 2011; Riley et al. 2012). The random
// walk built from the series is detrended by local polynomial fits whose
// overlapping halves are cross-faded into one smooth global trend; the
// residual fluctuation F(w) scales as w^H.

namespace lexdyn {

struct AfaConfig {
    int poly_order = 1;                             // local fit order M
    std::vector<int> window_sizes;                  // odd, increasing; empty = auto schedule
    std::optional<std::pair<int, int>> fit_range;   // inclusive index range into the window list
};

struct AfaResult {
    std::vector<double> log2_w;
    std::vector<double> log2_f;
    double hurst = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    std::vector<int> windows;           // scales used in the fit
    std::vector<int> excluded_windows;  // zero-fluctuation scales dropped from the fit
};

/// Walk profile: cumulative sum of deviations from the mean.
inline std::vector<double> to_random_walk(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 8)
        throw NumericError("to_random_walk: need at least 8 points, got " + std::to_string(n));
    double lo = series[0], hi = series[0];
    for (double v : series) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) return std::vector<double>(n, 0.0);  // constant series, exactly
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= double(n);
    std::vector<double> walk(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += series[i] - mean;
        walk[i] = acc;
    }
    return walk;
}

namespace detail {

// Least-squares polynomial of order M over points[0..len), evaluated at every
// point. The abscissa is centered and scaled to [-1,1] for conditioning.
inline std::vector<double> poly_fit_eval(const double* points, std::size_t len, int order) {
    const std::size_t p = std::size_t(order) + 1;
    const double mid = 0.5 * double(len - 1);
    const double half = len > 1 ? 0.5 * double(len - 1) : 1.0;
    DesignMatrix x(len, p);
    for (std::size_t i = 0; i < len; ++i) {
        const double t = (double(i) - mid) / half;
        double pw = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            x(i, j) = pw;
            pw *= t;
        }
    }
    QrLs qr(x, std::span<const double>(points, len));
    const std::vector<double> beta = qr.solve();
    std::vector<double> fitted(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double t = (double(i) - mid) / half;
        double acc = 0.0;
        for (std::size_t j = p; j-- > 0;) acc = acc * t + beta[j];
        fitted[i] = acc;
    }
    return fitted;
}

inline void check_window(std::size_t n, int w, int order) {
    if (w < 2 * order + 3)
        throw NumericError("afa: window " + std::to_string(w) + " too small for polynomial order " +
                           std::to_string(order));
    if (w % 2 == 0) throw NumericError("afa: window sizes must be odd, got " + std::to_string(w));
    if (std::size_t(w) > n)
        throw NumericError("afa: window " + std::to_string(w) + " exceeds series length " +
                           std::to_string(n));
}

}  // namespace detail

/// Smooth global trend for one window size. Segments of length w = 2n+1 start
/// every n points, so neighbours share n+1 points; on the shared half the two
/// local fits are blended with weights that fall off linearly with distance
/// from each segment's center:
///   v(l) = (1 - (l-1)/n) y_seg(l+n) + ((l-1)/n) y_next(l),  l = 1..n+1.
/// Leftover points past the last full segment get a partial segment fitted on
/// its actual points.
inline std::vector<double> global_trend(std::span<const double> walk, int w, int order) {
    const std::size_t len = walk.size();
    detail::check_window(len, w, order);
    const std::size_t half = std::size_t(w - 1) / 2;  // n

    // segment starts every `half` points; a final partial segment covers the tail
    std::vector<std::pair<std::size_t, std::size_t>> segs;  // (start, length)
    std::size_t s = 0;
    while (s + std::size_t(w) <= len) {
        segs.emplace_back(s, std::size_t(w));
        s += half;
    }
    const std::size_t last_start = segs.back().first;
    if (last_start + std::size_t(w) < len)
        segs.emplace_back(last_start + half, len - last_start - half);

    std::vector<std::vector<double>> fits(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i)
        fits[i] = detail::poly_fit_eval(walk.data() + segs[i].first, segs[i].second, order);

    std::vector<double> trend(len, 0.0);
    // first half of segment 0, including its center
    for (std::size_t g = 0; g <= half && g < len; ++g) trend[g] = fits[0][g];
    // cross-fade between each consecutive pair over their shared n+1 points
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
        const std::size_t sb = segs[i + 1].first;
        for (std::size_t j = 0; j <= half; ++j) {
            const double w2 = double(j) / double(half);
            const double w1 = 1.0 - w2;
            trend[sb + j] = w1 * fits[i][sb + j - segs[i].first] + w2 * fits[i + 1][j];
        }
    }
    // tail past the last blend keeps the last segment's own fit
    const auto& last = segs.back();
    for (std::size_t j = half + 1; j < last.second; ++j) trend[last.first + j] = fits.back()[j];
    return trend;
}

/// Root-mean-square residual of the walk around its global trend.
inline double fluctuation(std::span<const double> walk, int w, int order) {
    const std::vector<double> trend = global_trend(walk, w, order);
    double ss = 0.0;
    for (std::size_t i = 0; i < walk.size(); ++i) {
        const double r = walk[i] - trend[i];
        ss += r * r;
    }
    return std::sqrt(ss / double(walk.size()));
}

/// Log-spaced window schedule: 2^(k/2) rounded to the nearest odd integer,
/// covering [max(5, 2M+3), N/4], deduplicated.
inline std::vector<int> default_window_sizes(std::size_t n, int order = 1) {
    const int lo = std::max(5, 2 * order + 3);
    std::vector<int> out;
    for (int k = 0;; ++k) {
        const double v = std::pow(2.0, 0.5 * double(k));
        if (v > double(n)) break;
        const int odd = 2 * int(std::lround(0.5 * (v - 1.0))) + 1;
        if (odd < lo || std::size_t(odd) * 4 > n) continue;
        if (out.empty() || odd > out.back()) out.push_back(odd);
    }
    return out;
}

/// Full AFA estimate: walk construction, F(w) over the window schedule, and
/// an unweighted least-squares line through (log2 w, log2 F) whose slope is
/// the Hurst exponent.
inline AfaResult estimate_hurst(std::span<const double> series, const AfaConfig& cfg = {}) {
    if (cfg.poly_order < 1) throw std::invalid_argument("afa: poly_order must be >= 1");
    const std::size_t n = series.size();
    std::vector<int> windows =
        cfg.window_sizes.empty() ? default_window_sizes(n, cfg.poly_order) : cfg.window_sizes;
    if (windows.size() < 3)
        throw NumericError("afa: need at least 3 window sizes, have " +
                           std::to_string(windows.size()));
    for (std::size_t i = 0; i < windows.size(); ++i) {
        detail::check_window(n, windows[i], cfg.poly_order);
        if (std::size_t(windows[i]) * 4 > n)
            throw NumericError("afa: series length " + std::to_string(n) +
                               " < 4x window " + std::to_string(windows[i]));
        if (i > 0 && windows[i] <= windows[i - 1])
            throw NumericError("afa: window sizes must be strictly increasing");
    }

    std::size_t lo = 0, hi = windows.size() - 1;
    if (cfg.fit_range) {
        lo = std::size_t(std::max(0, cfg.fit_range->first));
        hi = std::size_t(std::min(int(windows.size()) - 1, cfg.fit_range->second));
        if (lo > hi) throw std::invalid_argument("afa: empty fit_range");
    }

    const std::vector<double> walk = to_random_walk(series);

    AfaResult res;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double f = fluctuation(walk, windows[i], cfg.poly_order);
        if (f > 0.0) {
            res.windows.push_back(windows[i]);
            res.log2_w.push_back(std::log2(double(windows[i])));
            res.log2_f.push_back(std::log2(f));
        } else {
            res.excluded_windows.push_back(windows[i]);
        }
    }
    if (res.log2_w.size() < 3)
        throw NumericError("afa: degenerate series, only " + std::to_string(res.log2_w.size()) +
                           " usable scales");

    const std::size_t m = res.log2_w.size();
    DesignMatrix x(m, 2);
    for (std::size_t i = 0; i < m; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = res.log2_w[i];
    }
    QrLs qr(x, res.log2_f);
    const std::vector<double> beta = qr.solve();
    const double rss = qr.rss();
    const double sigma2 = m > 2 ? rss / double(m - 2) : 0.0;
    const std::vector<double> se = qr.coef_se(sigma2);

    double mean_f = 0.0;
    for (double v : res.log2_f) mean_f += v;
    mean_f /= double(m);
    double tss = 0.0;
    for (double v : res.log2_f) tss += (v - mean_f) * (v - mean_f);

    res.hurst = beta[1];
    res.slope_stderr = se[1];
    res.r_squared = tss > 0.0 ? std::max(0.0, std::min(1.0, 1.0 - rss / tss)) : 1.0;
    return res;
}

}  // namespace lexdyn

#endif
