#ifndef LEXDYN_FFT_HPP
#define LEXDYN_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "lexdyn/error.hpp"

namespace lexdyn {

/// In-place iterative radix-2 FFT (decimation in time). Power-of-two length
/// only, which is all the circulant embedding in synth.hpp ever needs.
/// `inverse` applies the conjugate transform without the 1/n scaling.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (n == 0) return;
    if ((n & (n - 1)) != 0)
        throw NumericError("fft_radix2: length must be a power of two, got " + std::to_string(n));

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * pi / double(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace lexdyn

#endif
