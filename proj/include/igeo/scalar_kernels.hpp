#pragma once

// Scalar kernels underlying every chart and divergence in the library:
// theta(y) = y + log(y) on (0, inf), its inverse psi, and the family
// xi_alpha, all with closed-form derivatives expressed through psi.

#include <algorithm>
#include <cmath>
#include <string>

#include "igeo/errors.hpp"

namespace igeo {

struct ToleranceConfig {
    double root_abs_tol = 1e-14;
    int max_iter = 200;
    double fd_step = 1e-4;

    void validate() const {
        if (!(root_abs_tol > 0.0)) throw DomainError("root_abs_tol must be > 0");
        if (max_iter < 1) throw DomainError("max_iter must be >= 1");
        if (!(fd_step > 0.0)) throw DomainError("fd_step must be > 0");
    }
};

class AlphaParam {
  public:
    explicit AlphaParam(double value) : value_(value) {
        if (!(value >= -1.0 && value <= 1.0))
            throw InvalidAlphaError("alpha must lie in [-1, 1], got " + std::to_string(value));
    }

    double value() const { return value_; }
    AlphaParam dual() const { return AlphaParam(-value_); }

  private:
    double value_;
};

// Width of the band around |alpha| = 1 inside which the logarithmic
// limit branches are used; 4/(1 - alpha^2) amplifies rounding beyond it.
inline constexpr double alpha_branch_band = 1e-6;

inline double theta(double y) {
    if (!(y > 0.0)) throw DomainError("theta requires y > 0");
    return y + std::log(y);
}

// Inverse of theta. Newton iteration seeded by exp(z) for z < 0, z for
// z >= 1, 1 otherwise, safeguarded by bisection on the bracket
// [min(exp(z-1), 1), max(1, z)]. theta is concave and increasing, so the
// Newton step from below converges monotonically once inside the bracket.
inline double psi(double z, const ToleranceConfig& cfg = {}) {
    cfg.validate();
    if (!std::isfinite(z)) throw DomainError("psi requires finite z");
    if (z < -700.0 || z > 700.0) throw DomainError("psi argument outside [-700, 700]");

    double lo = std::min(std::exp(z - 1.0), 1.0);
    double hi = std::max(1.0, z);
    double y = 1.0;
    if (z < 0.0)
        y = std::exp(z);
    else if (z >= 1.0)
        y = z;
    y = std::clamp(y, lo, hi);

    for (int it = 0; it < cfg.max_iter; ++it) {
        const double f = y + std::log(y) - z;
        if (std::abs(f) <= cfg.root_abs_tol) {
            // one polishing step; Newton is quadratic, so this lands at
            // machine precision
            const double polished = y - f * y / (1.0 + y);
            return polished > 0.0 ? polished : y;
        }
        if (f > 0.0)
            hi = std::min(hi, y);
        else
            lo = std::max(lo, y);
        double next = y - f * y / (1.0 + y);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == y) return y; // interval exhausted at double precision
        y = next;
    }
    throw NumericsError("psi: root finder did not converge");
}

// Derivatives of psi in closed form, obtained by repeatedly
// differentiating psi' = psi / (1 + psi). All orders are bounded
// uniformly in z.
inline double psi_deriv_from_value(double p, int order) {
    if (order < 1 || order > 4) throw DomainError("psi_deriv supports orders 1..4");
    const double q = 1.0 + p;
    switch (order) {
        case 1: return p / q;
        case 2: return p / (q * q * q);
        case 3: return p * (1.0 - 2.0 * p) / (q * q * q * q * q);
        default: return p * (1.0 - 8.0 * p + 6.0 * p * p) / (q * q * q * q * q * q * q);
    }
}

inline double psi_deriv(double z, int order, const ToleranceConfig& cfg = {}) {
    return psi_deriv_from_value(psi(z, cfg), order);
}

// xi_alpha evaluated from a known density value p = psi(z). Exponents
// beta in {0, 1/2, 1} are special-cased so that the alpha = -1 and
// alpha = 0 embeddings are exact.
inline double xi_alpha_from_density(const AlphaParam& alpha, double p, int order) {
    if (order < 0 || order > 3) throw DomainError("xi_alpha supports orders 0..3");
    const double a = alpha.value();
    const double beta = 0.5 * (1.0 - a);
    const double q = 1.0 + p;
    auto pow_beta = [p](double e) {
        if (e == 0.0) return 1.0;
        if (e == 1.0) return p;
        if (e == 0.5) return std::sqrt(p);
        if (e == 2.0) return p * p;
        return std::pow(p, e);
    };
    switch (order) {
        case 0:
            if (a == 1.0) return std::log(p);
            return (2.0 / (1.0 - a)) * pow_beta(beta);
        case 1:
            return pow_beta(beta) / q;
        case 2:
            return beta * pow_beta(beta) / (q * q) - pow_beta(beta + 1.0) / (q * q * q);
        default:
            return beta * beta * pow_beta(beta) / (q * q * q)
                 - (3.0 * beta + 1.0) * pow_beta(beta + 1.0) / (q * q * q * q)
                 + 3.0 * pow_beta(beta + 2.0) / (q * q * q * q * q);
    }
}

inline double xi_alpha(const AlphaParam& alpha, double z, int order, const ToleranceConfig& cfg = {}) {
    if (order < 0 || order > 3) throw DomainError("xi_alpha supports orders 0..3");
    const double p = psi(z, cfg);
    if (order == 0 && alpha.value() == 1.0) return z - p; // log(psi(z)) without the extra log
    return xi_alpha_from_density(alpha, p, order);
}

} // namespace igeo
