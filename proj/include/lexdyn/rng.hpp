#ifndef LEXDYN_RNG_HPP
#define LEXDYN_RNG_HPP

#include <cstdint>
#include <cmath>
#include <random>

namespace lexdyn {

/// Identifier written into output metadata so runs can be reproduced.
/// mt19937_64 has a bit-exact stream pinned by the C++ standard; the normal
/// transform is done by hand because std::normal_distribution is
/// implementation-defined.
inline constexpr const char* kRngAlgorithm = "mt19937_64+box-muller";

/// Seeded random source. Uniforms come straight off the 64-bit stream,
/// normals via Box-Muller with the sine mate cached.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on (0, 1].
    double uniform() {
        return (double((eng_() >> 11)) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal draw.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Derive an independent child seed, used to give parallel workers
    /// their own deterministic streams.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
        // splitmix64 finalizer
        std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lexdyn

#endif
