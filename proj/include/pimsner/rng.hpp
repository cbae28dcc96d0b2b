// Deterministic seeded RNG. Doubles are derived from raw mt19937_64 bits so
// streams are reproducible independent of libstdc++ distribution internals.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace pimsner {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::int64_t index(std::int64_t n) { return static_cast<std::int64_t>(bits() % static_cast<std::uint64_t>(n)); }

    // standard normal, Box-Muller on our own uniforms
    double gauss() {
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::complex<double> cgauss() { return {gauss(), gauss()}; }

    Rng fork(std::uint64_t stream) { return Rng(eng_() ^ (0x9e3779b97f4a7c15ULL * (stream + 1))); }

  private:
    std::mt19937_64 eng_;
};

} // namespace pimsner
