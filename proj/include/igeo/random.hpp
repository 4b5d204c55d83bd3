#pragma once

// Seedable, portable randomness for sweeps and property tests. The
// engine is mt19937_64, whose output sequence is fixed by the standard;
// uniform doubles are built from raw 64-bit draws so results are
// bit-identical across platforms.

#include <cstdint>
#include <random>

#include "igeo/measure_core.hpp"
#include "igeo/prob_chart.hpp"

namespace igeo {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr const char* algorithm() { return "mt19937_64"; }

    std::uint64_t raw() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::mt19937_64 engine_;
};

inline Vec random_vector(Rng& rng, std::size_t n, double lo, double hi) {
    Vec out(n);
    for (double& x : out) x = rng.uniform(lo, hi);
    return out;
}

inline SampleSpace random_space(Rng& rng, std::size_t n) {
    Vec w = random_vector(rng, n, 0.2, 1.0);
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    return SampleSpace(std::move(w));
}

// Draws a centred chart point uniformly on a box and maps it through the
// centred chart inverse, so the result is a probability measure.
inline FiniteMeasure random_probability_measure(Rng& rng, const SampleSpace& space, double box = 2.0) {
    return phi_inverse(center_values(space, random_vector(rng, space.size(), -box, box)));
}

inline FiniteMeasure random_finite_measure(Rng& rng, const SampleSpace& space, double box = 2.5) {
    return chart_inverse(ChartVector(space, random_vector(rng, space.size(), -box, box)));
}

} // namespace igeo
