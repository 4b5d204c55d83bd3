#pragma once

// Alpha-divergences on finite measures, their first three derivatives in
// the balanced chart, the extended Fisher metric, the coefficient fields
// Gamma~_alpha (ambient) and Gamma_alpha (on probability measures), and
// the alpha-derivatives of vector fields together with their duality and
// decomposition identities.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "igeo/errors.hpp"
#include "igeo/measure_core.hpp"
#include "igeo/prob_chart.hpp"
#include "igeo/scalar_kernels.hpp"

namespace igeo {

// Extended alpha-divergence of finite measures. Within alpha_branch_band
// of |alpha| = 1 the logarithmic limit branches are used. The middle
// branch is accumulated pointwise; each summand is nonnegative by
// Young's inequality, so the sum is clamped at zero only to absorb
// rounding on the diagonal.
inline double divergence(const AlphaParam& alpha, const FiniteMeasure& P, const FiniteMeasure& Q) {
    require_same_space(P.space(), Q.space());
    const double a = alpha.value();
    const Vec& p = P.density();
    const Vec& q = Q.density();
    const Vec& w = P.space().weights();

    double acc = 0.0;
    if (a <= -1.0 + alpha_branch_band) {
        for (std::size_t i = 0; i < p.size(); ++i)
            acc += w[i] * (q[i] - p[i] + p[i] * std::log(p[i] / q[i]));
    } else if (a >= 1.0 - alpha_branch_band) {
        for (std::size_t i = 0; i < p.size(); ++i)
            acc += w[i] * (p[i] - q[i] + q[i] * std::log(q[i] / p[i]));
    } else {
        const double beta = 0.5 * (1.0 - a);
        const double cp = 2.0 / (1.0 + a);
        const double cq = 2.0 / (1.0 - a);
        const double cx = 4.0 / (1.0 - a * a);
        for (std::size_t i = 0; i < p.size(); ++i)
            acc += w[i] * (cp * p[i] + cq * q[i] - cx * std::pow(p[i], beta) * std::pow(q[i], 1.0 - beta));
    }
    return std::max(acc, 0.0);
}

// The same divergence assembled from the scalar kernels on chart values;
// an independent route used to cross-check divergence().
inline double divergence_via_kernels(const AlphaParam& alpha, const ChartVector& at, const ChartVector& bt,
                                     const ToleranceConfig& cfg = {}) {
    require_same_space(at.space(), bt.space());
    const double a = alpha.value();
    const Vec& av = at.values();
    const Vec& bv = bt.values();
    const Vec& w = at.space().weights();

    const AlphaParam minus_one(-1.0), plus_one(1.0);
    double acc = 0.0;
    if (a <= -1.0 + alpha_branch_band) {
        for (std::size_t i = 0; i < av.size(); ++i) {
            const double xa = xi_alpha(minus_one, av[i], 0, cfg);
            const double xb = xi_alpha(minus_one, bv[i], 0, cfg);
            acc += w[i] * (xb - xa + xa * xi_alpha(plus_one, av[i], 0, cfg) - xa * xi_alpha(plus_one, bv[i], 0, cfg));
        }
    } else if (a >= 1.0 - alpha_branch_band) {
        for (std::size_t i = 0; i < av.size(); ++i) {
            const double xa = xi_alpha(minus_one, av[i], 0, cfg);
            const double xb = xi_alpha(minus_one, bv[i], 0, cfg);
            acc += w[i] * (xa - xb + xi_alpha(plus_one, bv[i], 0, cfg) * xb - xi_alpha(plus_one, av[i], 0, cfg) * xb);
        }
    } else {
        const AlphaParam neg = alpha.dual();
        const double cp = 2.0 / (1.0 + a);
        const double cq = 2.0 / (1.0 - a);
        for (std::size_t i = 0; i < av.size(); ++i) {
            acc += w[i] * (cp * xi_alpha(minus_one, av[i], 0, cfg) + cq * xi_alpha(minus_one, bv[i], 0, cfg)
                           - xi_alpha(alpha, av[i], 0, cfg) * xi_alpha(neg, bv[i], 0, cfg));
        }
    }
    return std::max(acc, 0.0);
}

// Pointwise partial-derivative kernel of Upsilon_alpha(a~, b~) =
// xi_alpha(a~) xi_{-alpha}(b~): order (i, j) times a product of
// direction vectors.
inline Vec upsilon(const AlphaParam& alpha, const ChartVector& at, const ChartVector& bt, int i, int j,
                   std::span<const Vec> directions, const ToleranceConfig& cfg = {}) {
    require_same_space(at.space(), bt.space());
    if (i < 0 || j < 0 || i + j > 3) throw DomainError("upsilon supports partial orders with i + j <= 3");
    if (directions.size() != static_cast<std::size_t>(i + j))
        throw ShapeError("upsilon needs exactly i + j direction vectors");
    const std::size_t n = at.size();
    for (const Vec& d : directions)
        if (d.size() != n) throw ShapeError("direction length does not match sample space");

    const AlphaParam neg = alpha.dual();
    Vec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double v = xi_alpha(alpha, at.values()[k], i, cfg) * xi_alpha(neg, bt.values()[k], j, cfg);
        for (const Vec& d : directions) v *= d[k];
        out[k] = v;
    }
    return out;
}

// Extended Fisher metric in the balanced chart: E_mu p/(1+p)^2 u v.
inline double fisher_inner(const FiniteMeasure& P, std::span<const double> u, std::span<const double> v) {
    const std::size_t n = P.size();
    if (u.size() != n || v.size() != n) throw ShapeError("tangent vector length does not match sample space");
    const Vec& p = P.density();
    const Vec& w = P.space().weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = 1.0 + p[i];
        acc += w[i] * p[i] / (q * q) * u[i] * v[i];
    }
    return acc;
}

// Coefficient field of the ambient alpha-derivative:
// [(1-alpha)/2 - (1+alpha)/2 p] u v / (1+p)^2, pointwise.
inline Vec gamma_tilde(const AlphaParam& alpha, const FiniteMeasure& P, std::span<const double> u,
                       std::span<const double> v) {
    const std::size_t n = P.size();
    if (u.size() != n || v.size() != n) throw ShapeError("tangent vector length does not match sample space");
    const Vec& p = P.density();
    const double a = alpha.value();
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = 1.0 + p[i];
        out[i] = (0.5 * (1.0 - a) - 0.5 * (1.0 + a) * p[i]) * (u[i] * v[i]) / (q * q);
    }
    return out;
}

inline Vec gamma_tilde(const AlphaParam& alpha, const ChartVector& at, std::span<const double> u,
                       std::span<const double> v, const ToleranceConfig& cfg = {}) {
    return gamma_tilde(alpha, chart_inverse(at, cfg), u, v);
}

// Derivatives of the divergence in the balanced chart. Supported orders
// (i, j): (1,0), (0,1), (1,1) and (2,1), the last differentiating twice
// in the first slot. Evaluation with bt identical to at takes a
// dedicated diagonal path with no cancellation of off-diagonal terms.
inline double divergence_derivative(const AlphaParam& alpha, const ChartVector& at, const ChartVector& bt, int i,
                                    int j, std::span<const Vec> directions, const ToleranceConfig& cfg = {}) {
    require_same_space(at.space(), bt.space());
    const bool supported = (i == 1 && j == 0) || (i == 0 && j == 1) || (i == 1 && j == 1) || (i == 2 && j == 1);
    if (!supported) throw DomainError("divergence_derivative supports orders (1,0), (0,1), (1,1), (2,1)");
    if (directions.size() != static_cast<std::size_t>(i + j))
        throw ShapeError("divergence_derivative needs exactly i + j direction vectors");
    const std::size_t n = at.size();
    for (const Vec& d : directions)
        if (d.size() != n) throw ShapeError("direction length does not match sample space");

    const Vec& av = at.values();
    const Vec& bv = bt.values();
    const Vec& w = at.space().weights();
    const AlphaParam neg = alpha.dual();
    const bool diagonal = (av == bv);

    if (diagonal) {
        double acc = 0.0;
        if (i == 1 && j == 0) return 0.0;
        if (i == 0 && j == 1) return 0.0;
        if (i == 1 && j == 1) {
            for (std::size_t k = 0; k < n; ++k) {
                const double p = psi(av[k], cfg);
                const double q = 1.0 + p;
                acc += w[k] * p / (q * q) * directions[0][k] * directions[1][k];
            }
            return -acc;
        }
        // (2,1): -E_mu p/(1+p)^2 Gamma~_alpha(a~, u, v) w
        const double a = alpha.value();
        for (std::size_t k = 0; k < n; ++k) {
            const double p = psi(av[k], cfg);
            const double q = 1.0 + p;
            const double gam = (0.5 * (1.0 - a) - 0.5 * (1.0 + a) * p) * directions[0][k] * directions[1][k] / (q * q);
            acc += w[k] * p / (q * q) * gam * directions[2][k];
        }
        return -acc;
    }

    double acc = 0.0;
    if (i == 1 && j == 0) {
        for (std::size_t k = 0; k < n; ++k) {
            const double x1 = xi_alpha(alpha, av[k], 1, cfg);
            acc += w[k] * x1 * (xi_alpha(neg, av[k], 0, cfg) - xi_alpha(neg, bv[k], 0, cfg)) * directions[0][k];
        }
        return acc;
    }
    if (i == 0 && j == 1) {
        for (std::size_t k = 0; k < n; ++k) {
            const double y1 = xi_alpha(neg, bv[k], 1, cfg);
            acc += w[k] * (xi_alpha(alpha, bv[k], 0, cfg) - xi_alpha(alpha, av[k], 0, cfg)) * y1 * directions[0][k];
        }
        return acc;
    }
    if (i == 1 && j == 1) {
        for (std::size_t k = 0; k < n; ++k)
            acc += w[k] * xi_alpha(alpha, av[k], 1, cfg) * xi_alpha(neg, bv[k], 1, cfg) * directions[0][k]
                 * directions[1][k];
        return -acc;
    }
    for (std::size_t k = 0; k < n; ++k)
        acc += w[k] * xi_alpha(alpha, av[k], 2, cfg) * xi_alpha(neg, bv[k], 1, cfg) * directions[0][k]
             * directions[1][k] * directions[2][k];
    return -acc;
}

// A vector field given by its chart representation, with an optional
// analytic directional derivative. Ambient fields return chart
// directions on the full manifold of finite measures; on-manifold fields
// return centred directions at probability measures.
struct VectorField {
    enum class Domain { ambient, on_manifold };

    Domain domain = Domain::ambient;
    std::function<Vec(const FiniteMeasure&)> value;
    std::function<Vec(const FiniteMeasure&, const Vec&)> directional_derivative; // may be empty
};

namespace detail {

inline Vec field_value(const VectorField& field, const FiniteMeasure& P) {
    Vec v = field.value(P);
    if (v.size() != P.size()) throw ShapeError("vector field value length does not match sample space");
    return v;
}

// Derivative of an ambient field's chart representation along a chart
// direction, by callback or by central differences through the chart.
inline Vec field_derivative_ambient(const VectorField& field, const FiniteMeasure& P, const Vec& direction,
                                    const ToleranceConfig& cfg, bool allow_fd) {
    if (field.directional_derivative) return field.directional_derivative(P, direction);
    if (!allow_fd) throw MissingDerivativeError("vector field has no directional derivative callback");
    const ChartVector at = chart_forward(P);
    const double h = cfg.fd_step * (1.0 + sup_norm(at.values()));
    Vec plus = at.values(), minus = at.values();
    for (std::size_t i = 0; i < plus.size(); ++i) {
        plus[i] += h * direction[i];
        minus[i] -= h * direction[i];
    }
    const Vec vp = field_value(field, chart_inverse(ChartVector(P.space(), std::move(plus)), cfg));
    const Vec vm = field_value(field, chart_inverse(ChartVector(P.space(), std::move(minus)), cfg));
    Vec out(vp.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (vp[i] - vm[i]) / (2.0 * h);
    return out;
}

// Same for on-manifold fields, differencing through the centred chart.
inline Vec field_derivative_on_m(const VectorField& field, const FiniteMeasure& P, const Vec& direction,
                                 const ToleranceConfig& cfg, bool allow_fd) {
    if (field.directional_derivative) return field.directional_derivative(P, direction);
    if (!allow_fd) throw MissingDerivativeError("vector field has no directional derivative callback");
    const CenteredChartVector a = phi_forward(P);
    const double h = cfg.fd_step * (1.0 + sup_norm(a.values()));
    Vec plus = a.values(), minus = a.values();
    for (std::size_t i = 0; i < plus.size(); ++i) {
        plus[i] += h * direction[i];
        minus[i] -= h * direction[i];
    }
    const Vec vp = field_value(field, phi_inverse(center_values(P.space(), std::move(plus)), cfg));
    const Vec vm = field_value(field, phi_inverse(center_values(P.space(), std::move(minus)), cfg));
    Vec out(vp.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (vp[i] - vm[i]) / (2.0 * h);
    return out;
}

} // namespace detail

// Ambient alpha-derivative: chart representation U v~_P + Gamma~_alpha.
inline TangentRep alpha_derivative_ambient(const AlphaParam& alpha, const VectorField& U, const VectorField& V,
                                           const FiniteMeasure& P, const ToleranceConfig& cfg = {},
                                           bool allow_fd = true) {
    if (U.domain != VectorField::Domain::ambient || V.domain != VectorField::Domain::ambient)
        throw DomainError("alpha_derivative_ambient requires ambient vector fields");
    const Vec u = detail::field_value(U, P);
    const Vec v = detail::field_value(V, P);
    const Vec uv = detail::field_derivative_ambient(V, P, u, cfg, allow_fd);
    const Vec gam = gamma_tilde(alpha, P, u, v);
    Vec dir(u.size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = uv[i] + gam[i];
    return TangentRep(chart_forward(P), std::move(dir));
}

// Residual of the duality identity
// U<V,W>_P = <nabla~^alpha_U V, W>_P + <V, nabla~^{-alpha}_U W>_P,
// with the left side formed by central differences along U.
inline double duality_residual(const AlphaParam& alpha, const VectorField& U, const VectorField& V,
                               const VectorField& W, const FiniteMeasure& P, const ToleranceConfig& cfg = {},
                               bool allow_fd = true) {
    const Vec u = detail::field_value(U, P);
    const Vec v = detail::field_value(V, P);
    const Vec w = detail::field_value(W, P);
    const ChartVector at = chart_forward(P);
    const double h = cfg.fd_step * (1.0 + sup_norm(at.values()));

    Vec plus = at.values(), minus = at.values();
    for (std::size_t i = 0; i < plus.size(); ++i) {
        plus[i] += h * u[i];
        minus[i] -= h * u[i];
    }
    const FiniteMeasure Pp = chart_inverse(ChartVector(P.space(), std::move(plus)), cfg);
    const FiniteMeasure Pm = chart_inverse(ChartVector(P.space(), std::move(minus)), cfg);
    const double fp = fisher_inner(Pp, detail::field_value(V, Pp), detail::field_value(W, Pp));
    const double fm = fisher_inner(Pm, detail::field_value(V, Pm), detail::field_value(W, Pm));
    const double lhs = (fp - fm) / (2.0 * h);

    const Vec dv = alpha_derivative_ambient(alpha, U, V, P, cfg, allow_fd).direction();
    const Vec dw = alpha_derivative_ambient(alpha.dual(), U, W, P, cfg, allow_fd).direction();
    return std::abs(lhs - fisher_inner(P, dv, w) - fisher_inner(P, v, dw));
}

// Coefficient field of the alpha-derivative on probability measures:
// (1-alpha)/2 (D - E_mu D) - (1+alpha)/2 p (D - <U,V>_P), with
// D = (Drho_a u)(Drho_a v)/(1+p)^2.
inline Vec gamma_m(const AlphaParam& alpha, const CenteredChartVector& a, const CenteredChartVector& u,
                   const CenteredChartVector& v, const ToleranceConfig& cfg = {}) {
    require_same_space(a.space(), u.space());
    require_same_space(a.space(), v.space());
    const detail::SolvedChart sc = detail::solve_chart(a, cfg);
    const Vec& w = a.space().weights();
    const std::size_t n = a.size();

    double den = 0.0, num_u = 0.0, num_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        den += w[i] * sc.psi1[i];
        num_u += w[i] * sc.psi1[i] * u.values()[i];
        num_v += w[i] * sc.psi1[i] * v.values()[i];
    }

    Vec d(n);
    double mean_d = 0.0, fisher_uv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double du = u.values()[i] - num_u / den;
        const double dv = v.values()[i] - num_v / den;
        const double q = 1.0 + sc.density[i];
        d[i] = du * dv / (q * q);
        mean_d += w[i] * d[i];
        fisher_uv += w[i] * sc.density[i] * d[i];
    }

    const double al = alpha.value();
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = 0.5 * (1.0 - al) * (d[i] - mean_d) - 0.5 * (1.0 + al) * sc.density[i] * (d[i] - fisher_uv);
    return out;
}

// Tangent representation in the centred chart.
struct MTangentRep {
    CenteredChartVector base;
    Vec direction;
};

// Alpha-derivative on probability measures: U v_P + Gamma_alpha(a, u, v)
// in the centred chart.
inline MTangentRep alpha_derivative_m(const AlphaParam& alpha, const VectorField& U, const VectorField& V,
                                      const FiniteMeasure& P, const ToleranceConfig& cfg = {},
                                      bool allow_fd = true) {
    if (U.domain != VectorField::Domain::on_manifold || V.domain != VectorField::Domain::on_manifold)
        throw DomainError("alpha_derivative_m requires on-manifold vector fields");
    const CenteredChartVector a = phi_forward(P);
    const Vec u = detail::field_value(U, P);
    const Vec v = detail::field_value(V, P);
    const Vec uv = detail::field_derivative_on_m(V, P, u, cfg, allow_fd);
    const Vec gam = gamma_m(alpha, a, CenteredChartVector(a.space(), u), CenteredChartVector(a.space(), v), cfg);
    Vec dir(u.size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = uv[i] + gam[i];
    return MTangentRep{a, std::move(dir)};
}

} // namespace igeo
