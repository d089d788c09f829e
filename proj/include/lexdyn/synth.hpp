#ifndef LEXDYN_SYNTH_HPP
#define LEXDYN_SYNTH_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lexdyn/error.hpp"
#include "lexdyn/fft.hpp"
#include "lexdyn/rng.hpp"

namespace lexdyn {

struct FgnSpec {
    std::size_t n = 0;       // power of two, >= 64
    double hurst = 0.5;      // in (0, 1)
    std::uint64_t seed = 0;
};

/// Exact autocovariance of unit-variance fractional Gaussian noise.
inline double fgn_autocov(double hurst, std::size_t lag) {
    const double k = double(lag);
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) +
                  (lag == 0 ? 1.0 : std::pow(k - 1.0, h2)));
}

/// Fractional Gaussian noise by circulant embedding (Davies & Harte 1987).
/// The target covariance is hit exactly, not asymptotically, and the cost is
/// one FFT of length 2n. Deterministic per seed.
inline std::vector<double> gen_fgn(const FgnSpec& spec) {
    const std::size_t n = spec.n;
    if (n < 64 || (n & (n - 1)) != 0)
        throw std::invalid_argument("gen_fgn: n must be a power of two >= 64");
    if (!(spec.hurst > 0.0 && spec.hurst < 1.0))
        throw std::invalid_argument("gen_fgn: hurst must lie in (0,1)");

    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> c(m);
    for (std::size_t j = 0; j <= n; ++j) c[j] = fgn_autocov(spec.hurst, j);
    for (std::size_t j = 1; j < n; ++j) c[m - j] = c[j];

    fft_radix2(c);  // eigenvalues of the circulant embedding

    double lam_max = 0.0;
    for (auto& v : c) lam_max = std::max(lam_max, v.real());
    std::vector<double> lam(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double l = c[k].real();
        // nonnegative for fGn on power-of-two sizes, but the embedding is
        // only valid if that holds, so verify
        if (l < -1e-8 * lam_max)
            throw NumericError("gen_fgn: circulant embedding has negative eigenvalue");
        lam[k] = l > 0.0 ? l : 0.0;
    }

    Rng rng(spec.seed);
    std::vector<std::complex<double>> v(m);
    const double inv_sqrt2 = 0.70710678118654752440;
    v[0] = std::sqrt(lam[0]) * rng.normal();
    for (std::size_t k = 1; k < n; ++k) {
        const double a = rng.normal();
        const double b = rng.normal();
        v[k] = std::sqrt(lam[k]) * std::complex<double>(a * inv_sqrt2, b * inv_sqrt2);
        v[m - k] = std::conj(v[k]);
    }
    v[n] = std::sqrt(lam[n]) * rng.normal();

    fft_radix2(v);
    const double scale = 1.0 / std::sqrt(double(m));
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = v[j].real() * scale;
    return out;
}

struct VarSpec {
    std::size_t n = 0;
    double a_xx = 0.0, a_yy = 0.0;  // own-lag coefficients
    double a_xy = 0.0;              // coupling x -> y
    double a_yx = 0.0;              // coupling y -> x
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
};

inline double var_spectral_radius(const VarSpec& s) {
    // eigenvalues of [[a_xx, a_yx], [a_xy, a_yy]]
    const double tr = s.a_xx + s.a_yy;
    const double det = s.a_xx * s.a_yy - s.a_yx * s.a_xy;
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return std::max(std::fabs(0.5 * (tr + root)), std::fabs(0.5 * (tr - root)));
    }
    return std::sqrt(det);
}

/// Bivariate VAR(1) pair with known causal direction:
///   x_t = a_xx x_{t-1} + a_yx y_{t-1} + e_x
///   y_t = a_yy y_{t-1} + a_xy x_{t-1} + e_y
/// 500 burn-in samples are discarded. Deterministic per seed.
inline std::pair<std::vector<double>, std::vector<double>> gen_var(const VarSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("gen_var: n must be positive");
    if (!(spec.noise_sd > 0.0)) throw std::invalid_argument("gen_var: noise_sd must be positive");
    if (var_spectral_radius(spec) >= 1.0)
        throw NumericError("gen_var: coefficient matrix is unstable (spectral radius >= 1)");

    constexpr std::size_t burn_in = 500;
    Rng rng(spec.seed);
    std::vector<double> x(spec.n), y(spec.n);
    double xp = 0.0, yp = 0.0;
    for (std::size_t t = 0; t < burn_in + spec.n; ++t) {
        const double ex = spec.noise_sd * rng.normal();
        const double ey = spec.noise_sd * rng.normal();
        const double xc = spec.a_xx * xp + spec.a_yx * yp + ex;
        const double yc = spec.a_yy * yp + spec.a_xy * xp + ey;
        if (t >= burn_in) {
            x[t - burn_in] = xc;
            y[t - burn_in] = yc;
        }
        xp = xc;
        yp = yc;
    }
    return {std::move(x), std::move(y)};
}

}  // namespace lexdyn

#endif
