#ifndef LEXDYN_DIST_HPP
#define LEXDYN_DIST_HPP

#include <cmath>
#include <limits>
#include <string>

#include "lexdyn/error.hpp"

// p-value kernels. No statistical runtime is assumed, so the incomplete
// beta/gamma functions are evaluated directly: series where they converge
// fast, modified Lentz continued fractions elsewhere.
// https://en.wikipedia.org/wiki/Beta_function#Incomplete_beta_function

namespace lexdyn {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// continued fraction for the regularized incomplete beta, modified Lentz
inline double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-16;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incbeta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw NumericError("incbeta: parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                     detail::betacf(b, a, 1.0 - x) / b;
}

namespace detail {

// series for P(a, x), accurate when x < a + 1
inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), accurate when x >= a + 1
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x). The complement is computed on
/// whichever side keeps full relative precision in its own tail.
inline double gammap(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw NumericError("gammap: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

inline double gammaq(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw NumericError("gammaq: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z * 0.70710678118654752440); }

inline double normal_pdf(double z) {
    return 0.39894228040143267794 * std::exp(-0.5 * z * z);
}

/// Inverse standard normal CDF. Hastings seed (A&S 26.2.22) polished by
/// Newton on log(Phi); accurate to ~1e-15 over (0, 1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw NumericError("normal_quantile: p must lie in (0,1), got " + std::to_string(p));
    const bool upper = p > 0.5;
    const double q = upper ? 1.0 - p : p;  // lower-tail mass, <= 0.5
    const double t = std::sqrt(-2.0 * std::log(q));
    double z = -(t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t));
    const double logq = std::log(q);
    for (int it = 0; it < 8; ++it) {
        const double cdf = normal_cdf(z);
        if (cdf <= 0.0) break;
        const double f = std::log(cdf) - logq;
        const double fp = normal_pdf(z) / cdf;
        const double step = f / fp;
        z -= step;
        if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(z))) break;
    }
    return upper ? -z : z;
}

/// Two-sided p-value of a t statistic with df degrees of freedom.
inline double t_sf_two_sided(double t, double df) {
    if (!(df > 0.0)) throw NumericError("t_sf_two_sided: df must be positive");
    if (std::isinf(t)) return 0.0;
    return incbeta(0.5 * df, 0.5, df / (df + t * t));
}

/// Upper tail of the F distribution: P(F_{d1,d2} > f).
inline double f_sf(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw NumericError("f_sf: df must be positive");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incbeta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

/// Upper tail of the chi-square distribution with k degrees of freedom.
inline double chisq_sf(double x, double k) {
    if (!(k > 0.0)) throw NumericError("chisq_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    return gammaq(0.5 * k, 0.5 * x);
}

}  // namespace lexdyn

#endif
