#pragma once

// The centred chart on probability measures: a = a~ - E_mu a~, the
// normalization value Z(a) solving E_mu psi(a + Z) = 1, the inclusion
// map rho(a) = a + Z(a) with first and second derivatives, and the
// splitting of ambient tangent vectors into a tangent-to-M part and the
// one-dimensional complement direction psi'(a~).

#include <cmath>
#include <cstddef>
#include <utility>

#include "igeo/errors.hpp"
#include "igeo/measure_core.hpp"
#include "igeo/scalar_kernels.hpp"

namespace igeo {

// Chart vector with E_mu a = 0.
class CenteredChartVector {
  public:
    CenteredChartVector(SampleSpace space, Vec values) : space_(std::move(space)), values_(std::move(values)) {
        if (values_.size() != space_.size()) throw ShapeError("chart vector length does not match sample space");
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("chart vector entries must be finite");
        if (std::abs(expectation(space_, values_)) > 1e-12)
            throw DomainError("centred chart vector must have zero mean");
    }

    const SampleSpace& space() const { return space_; }
    const Vec& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

  private:
    SampleSpace space_;
    Vec values_;
};

inline CenteredChartVector center_values(const SampleSpace& space, Vec a) {
    // two passes so the residual mean is at rounding level even for
    // large entries
    for (int pass = 0; pass < 2; ++pass) {
        const double mean = expectation(space, a);
        for (double& x : a) x -= mean;
    }
    return CenteredChartVector(space, std::move(a));
}

inline CenteredChartVector center(const ChartVector& chart) {
    return center_values(chart.space(), chart.values());
}

struct NormalizationResult {
    double z = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Root of z -> E_mu psi(a + z) = 1. The map is smooth, convex and
// strictly increasing, and equals psi(1) = 1 at z = 1 only for a = 0,
// otherwise exceeds 1 there; Newton seeded at z = 1 descends
// monotonically onto the root, with a doubling bracket and bisection as
// safeguard.
inline NormalizationResult solve_z(const CenteredChartVector& a, const ToleranceConfig& cfg = {}) {
    cfg.validate();
    const Vec& av = a.values();
    const Vec& w = a.space().weights();

    auto value = [&](double z) {
        double s = 0.0;
        for (std::size_t i = 0; i < av.size(); ++i) s += w[i] * psi(av[i] + z, cfg);
        return s;
    };
    auto deriv = [&](double z) {
        double s = 0.0;
        for (std::size_t i = 0; i < av.size(); ++i) {
            const double p = psi(av[i] + z, cfg);
            s += w[i] * p / (1.0 + p);
        }
        return s;
    };

    double lo = 1.0, hi = 1.0;
    double flo = value(lo) - 1.0, fhi = flo;
    for (double width = 1.0; flo > 0.0; width *= 2.0) {
        hi = lo;
        fhi = flo;
        lo -= width;
        flo = value(lo) - 1.0;
    }
    for (double width = 1.0; fhi < 0.0; width *= 2.0) {
        lo = hi;
        flo = fhi;
        hi += width;
        fhi = value(hi) - 1.0;
    }

    double z = hi;
    double f = fhi;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        if (std::abs(f) <= cfg.root_abs_tol) {
            // polish once; lands at machine precision
            const double polished = z - f / deriv(z);
            return NormalizationResult{polished, value(polished) - 1.0, it};
        }
        if (f > 0.0)
            hi = std::min(hi, z);
        else
            lo = std::max(lo, z);
        double next = z - f / deriv(z);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == z) return NormalizationResult{z, f, it};
        z = next;
        f = value(z) - 1.0;
    }
    throw NumericsError("solve_z: normalization root did not converge");
}

namespace detail {

// Solved state at a centred chart point, shared by the derivative and
// connection formulas.
struct SolvedChart {
    double z;
    Vec chart;   // a + z
    Vec density; // psi(a + z)
    Vec psi1;    // density / (1 + density)
};

inline SolvedChart solve_chart(const CenteredChartVector& a, const ToleranceConfig& cfg = {}) {
    const NormalizationResult norm = solve_z(a, cfg);
    const Vec& av = a.values();
    SolvedChart out;
    out.z = norm.z;
    out.chart.resize(av.size());
    out.density.resize(av.size());
    out.psi1.resize(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
        out.chart[i] = av[i] + norm.z;
        out.density[i] = psi(out.chart[i], cfg);
        out.psi1[i] = out.density[i] / (1.0 + out.density[i]);
    }
    return out;
}

} // namespace detail

inline CenteredChartVector phi_forward(const FiniteMeasure& measure) {
    if (!measure.is_probability()) throw NotProbabilityError("phi_forward requires a probability measure");
    return center(chart_forward(measure));
}

inline FiniteMeasure phi_inverse(const CenteredChartVector& a, const ToleranceConfig& cfg = {}) {
    detail::SolvedChart sc = detail::solve_chart(a, cfg);
    return FiniteMeasure(a.space(), std::move(sc.density));
}

inline ChartVector rho(const CenteredChartVector& a, const ToleranceConfig& cfg = {}) {
    const double z = solve_z(a, cfg).z;
    Vec out = a.values();
    for (double& x : out) x += z;
    return ChartVector(a.space(), std::move(out));
}

// D rho_a u = u - E_mu[psi'(a~) u] / E_mu[psi'(a~)]; the image is
// exactly the kernel of f -> E_mu[psi'(a~) f].
inline Vec d_rho(const CenteredChartVector& a, const CenteredChartVector& u, const ToleranceConfig& cfg = {}) {
    require_same_space(a.space(), u.space());
    const detail::SolvedChart sc = detail::solve_chart(a, cfg);
    const Vec& w = a.space().weights();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num += w[i] * sc.psi1[i] * u.values()[i];
        den += w[i] * sc.psi1[i];
    }
    Vec out = u.values();
    const double shift = num / den;
    for (double& x : out) x -= shift;
    return out;
}

// Second derivative of rho: a constant vector, since Z is the only
// nonlinear ingredient of rho(a) = a + Z(a).
inline Vec d2_rho(const CenteredChartVector& a, const CenteredChartVector& u, const CenteredChartVector& v,
                  const ToleranceConfig& cfg = {}) {
    require_same_space(a.space(), u.space());
    require_same_space(a.space(), v.space());
    const detail::SolvedChart sc = detail::solve_chart(a, cfg);
    const Vec& w = a.space().weights();
    double den = 0.0, num_u = 0.0, num_v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        den += w[i] * sc.psi1[i];
        num_u += w[i] * sc.psi1[i] * u.values()[i];
        num_v += w[i] * sc.psi1[i] * v.values()[i];
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double du = u.values()[i] - num_u / den;
        const double dv = v.values()[i] - num_v / den;
        const double q = 1.0 + sc.density[i];
        acc += w[i] * sc.psi1[i] * (du * dv) / (q * q);
    }
    return Vec(u.size(), -acc / den);
}

struct TangentSplit {
    CenteredChartVector m_part;
    double complement; // coefficient of psi'(a~)
};

// L2(mu)-orthogonal split of an ambient direction into D rho_a(m_part)
// plus complement * psi'(a~).
inline TangentSplit tangent_split(const FiniteMeasure& measure, std::span<const double> direction,
                                  const ToleranceConfig& cfg = {}) {
    if (!measure.is_probability()) throw NotProbabilityError("tangent_split requires a probability measure");
    if (direction.size() != measure.size()) throw ShapeError("direction length does not match sample space");
    const SampleSpace& space = measure.space();
    const Vec& w = space.weights();
    const Vec& p = measure.density();

    Vec s(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) s[i] = p[i] / (1.0 + p[i]);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        num += w[i] * direction[i] * s[i];
        den += w[i] * s[i] * s[i];
    }
    const double y = num / den;

    Vec rest(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) rest[i] = direction[i] - y * s[i];
    (void)cfg;
    return TangentSplit{center_values(space, std::move(rest)), y};
}

// phi^-1 of the centred chart image of an arbitrary finite measure;
// the projection of the ambient manifold onto probability measures.
inline FiniteMeasure project_to_probability(const FiniteMeasure& measure, const ToleranceConfig& cfg = {}) {
    return phi_inverse(center(chart_forward(measure)), cfg);
}

} // namespace igeo
