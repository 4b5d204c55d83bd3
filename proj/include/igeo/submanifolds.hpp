#pragma once

// Finite-dimensional embedded submanifolds given by parameter charts
// y -> a~(y): pullback Fisher matrices, Christoffel symbols of the
// alpha-connections, geodesics, (dual) parallel transport, exponential
// families with closed-form statistics, and natural-gradient descent.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "igeo/divergence_geometry.hpp"
#include "igeo/errors.hpp"
#include "igeo/measure_core.hpp"
#include "igeo/scalar_kernels.hpp"

namespace igeo {

struct DomainBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    static DomainBox unbounded(int dim) {
        const double inf = std::numeric_limits<double>::infinity();
        return DomainBox{Eigen::VectorXd::Constant(dim, -inf), Eigen::VectorXd::Constant(dim, inf)};
    }

    bool contains(const Eigen::VectorXd& y) const {
        if (y.size() != lo.size()) return false;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (!(y[i] >= lo[i] && y[i] <= hi[i])) return false;
        return true;
    }
};

// A d-dimensional parametric family through its chart map y -> a~(y),
// the tangent basis w~_i = d_i a~, and the second parameter derivatives
// needed by the Christoffel symbols. The hessian is stored row-major as
// d*d sample-space vectors, symmetric in (i, j).
struct ParametricFamily {
    enum class Membership { ambient, probability };

    SampleSpace space;
    int dim = 0;
    DomainBox domain;
    Membership membership = Membership::ambient;
    std::function<Vec(const Eigen::VectorXd&)> chart_map;
    std::function<std::vector<Vec>(const Eigen::VectorXd&)> jacobian;
    std::function<std::vector<Vec>(const Eigen::VectorXd&)> hessian;
    std::function<Vec(const Eigen::VectorXd&)> density_map; // optional closed form
};

namespace detail {

inline void require_in_domain(const ParametricFamily& family, const Eigen::VectorXd& y, const char* what) {
    if (y.size() != family.dim) throw ShapeError("parameter dimension does not match family");
    if (!family.domain.contains(y)) throw OutOfDomainError(std::string(what) + ": parameter outside domain box");
}

inline Vec family_density(const ParametricFamily& family, const Eigen::VectorXd& y, const ToleranceConfig& cfg) {
    if (family.density_map) return family.density_map(y);
    Vec a = family.chart_map(y);
    Vec p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = psi(a[i], cfg);
    return p;
}

} // namespace detail

// Fisher matrix and connection coefficients at one parameter point.
struct ConnectionData {
    Eigen::MatrixXd g;
    Eigen::MatrixXd g_inv;
    std::vector<Eigen::MatrixXd> christoffel; // christoffel[k](i, j)
};

inline ConnectionData fisher_matrix(const ParametricFamily& family, const Eigen::VectorXd& y,
                                    const ToleranceConfig& cfg = {}) {
    detail::require_in_domain(family, y, "fisher_matrix");
    const int d = family.dim;
    const Vec p = detail::family_density(family, y, cfg);
    const std::vector<Vec> jac = family.jacobian(y);
    if (static_cast<int>(jac.size()) != d) throw ShapeError("jacobian must supply dim tangent vectors");
    const Vec& w = family.space.weights();
    const std::size_t n = family.space.size();

    Vec r(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double q = 1.0 + p[k];
        r[k] = w[k] * p[k] / (q * q);
    }

    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += r[k] * jac[i][k] * jac[j][k];
            g(i, j) = s;
            g(j, i) = s;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const auto& ev = es.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw SingularMetricError("fisher matrix is singular or ill-conditioned at this parameter point");

    ConnectionData out;
    out.g = std::move(g);
    out.g_inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return out;
}

// Christoffel symbols of the alpha-connection, as the chain rule of
// -g^{kl} d_i d_j d_l D_alpha produces them: the Gamma~ contraction plus
// the chart-hessian contraction. Setting include_chart_hessian = false
// drops the hessian term, for comparison against the plain contraction.
inline ConnectionData christoffel(const ParametricFamily& family, const Eigen::VectorXd& y, const AlphaParam& alpha,
                                  const ToleranceConfig& cfg = {}, bool include_chart_hessian = true) {
    ConnectionData data = fisher_matrix(family, y, cfg);
    const int d = family.dim;
    const Vec p = detail::family_density(family, y, cfg);
    const std::vector<Vec> jac = family.jacobian(y);
    const std::vector<Vec> hess = family.hessian(y);
    if (static_cast<int>(hess.size()) != d * d) throw ShapeError("hessian must supply dim*dim vectors");
    const Vec& w = family.space.weights();
    const std::size_t n = family.space.size();
    const double a = alpha.value();

    Vec r(n), gfac(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double q = 1.0 + p[k];
        r[k] = w[k] * p[k] / (q * q);
        gfac[k] = (0.5 * (1.0 - a) - 0.5 * (1.0 + a) * p[k]) / (q * q);
    }

    // t(i,j,l) = E_mu r [Gamma~_alpha(a~, w~_i, w~_j) + d_i d_j a~] w~_l
    std::vector<Eigen::MatrixXd> t(d, Eigen::MatrixXd(d, d));
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            for (int l = 0; l < d; ++l) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    double core = gfac[k] * jac[i][k] * jac[j][k];
                    if (include_chart_hessian) core += hess[i * d + j][k];
                    s += r[k] * core * jac[l][k];
                }
                t[l](i, j) = s;
                t[l](j, i) = s;
            }
        }
    }

    data.christoffel.assign(d, Eigen::MatrixXd::Zero(d, d));
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) data.christoffel[k] += data.g_inv(k, l) * t[l];
    return data;
}

// Exponential family exp(sum_i y^i eta_i - c(y)) with centred statistics.
struct ExponentialFamily {
    SampleSpace space;
    std::vector<Vec> statistics;
    Eigen::MatrixXd gram;
    Eigen::MatrixXd gram_inv;
    ParametricFamily family;
};

inline ExponentialFamily expfam_build(const SampleSpace& space, std::vector<Vec> statistics, DomainBox domain) {
    const int d = static_cast<int>(statistics.size());
    if (d == 0) throw DomainError("exponential family needs at least one statistic");
    if (domain.lo.size() != d || domain.hi.size() != d) throw ShapeError("domain box dimension mismatch");
    for (const Vec& eta : statistics) {
        if (eta.size() != space.size()) throw ShapeError("statistic length does not match sample space");
        if (std::abs(expectation(space, eta)) > 1e-12) throw DomainError("statistics must be centred under mu");
    }

    Eigen::MatrixXd gram(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < space.size(); ++k)
                s += space.weights()[k] * statistics[i][k] * statistics[j][k];
            gram(i, j) = s;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (!(es.eigenvalues().minCoeff() > 1e-12 * std::max(es.eigenvalues().maxCoeff(), 1e-300)))
        throw SingularGramError("statistics have a singular Gram matrix");
    Eigen::MatrixXd gram_inv =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

    const std::size_t n = space.size();
    auto stats = std::make_shared<const std::vector<Vec>>(std::move(statistics));
    const Vec weights = space.weights();

    auto log_density = [stats, weights, n, d](const Eigen::VectorXd& y) {
        Vec s(n, 0.0);
        for (int j = 0; j < d; ++j)
            for (std::size_t k = 0; k < n; ++k) s[k] += y[j] * (*stats)[j][k];
        double m = s[0];
        for (double v : s) m = std::max(m, v);
        double z = 0.0;
        for (std::size_t k = 0; k < n; ++k) z += weights[k] * std::exp(s[k] - m);
        const double c = m + std::log(z);
        for (double& v : s) v -= c;
        return s;
    };
    auto density = [log_density, n](const Eigen::VectorXd& y) {
        Vec p = log_density(y);
        for (std::size_t k = 0; k < n; ++k) p[k] = std::exp(p[k]);
        return p;
    };
    auto centred_stats = [stats, density, weights, n, d](const Eigen::VectorXd& y) {
        const Vec p = density(y);
        std::vector<Vec> m(d, Vec(n));
        for (int j = 0; j < d; ++j) {
            double mean = 0.0;
            for (std::size_t k = 0; k < n; ++k) mean += weights[k] * p[k] * (*stats)[j][k];
            for (std::size_t k = 0; k < n; ++k) m[j][k] = (*stats)[j][k] - mean;
        }
        return m;
    };

    auto chart_map = [log_density, density, n](const Eigen::VectorXd& y) {
        const Vec lp = log_density(y);
        const Vec p = density(y);
        Vec a(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = p[k] + lp[k];
        return a;
    };
    auto jacobian = [density, centred_stats, n, d](const Eigen::VectorXd& y) {
        const Vec p = density(y);
        const std::vector<Vec> m = centred_stats(y);
        std::vector<Vec> jac(d, Vec(n));
        for (int j = 0; j < d; ++j)
            for (std::size_t k = 0; k < n; ++k) jac[j][k] = (1.0 + p[k]) * m[j][k];
        return jac;
    };
    auto hessian = [density, centred_stats, weights, n, d](const Eigen::VectorXd& y) {
        const Vec p = density(y);
        const std::vector<Vec> m = centred_stats(y);
        std::vector<Vec> hess(static_cast<std::size_t>(d) * d, Vec(n));
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double cov = 0.0;
                for (std::size_t k = 0; k < n; ++k) cov += weights[k] * p[k] * m[i][k] * m[j][k];
                for (std::size_t k = 0; k < n; ++k) {
                    const double v = p[k] * m[i][k] * m[j][k] - (1.0 + p[k]) * cov;
                    hess[i * d + j][k] = v;
                    hess[j * d + i][k] = v;
                }
            }
        return hess;
    };

    ParametricFamily family{space,     d,        std::move(domain), ParametricFamily::Membership::probability,
                            chart_map, jacobian, hessian,           density};
    return ExponentialFamily{space, *stats, std::move(gram), std::move(gram_inv), std::move(family)};
}

// Inverse of the exponential-family chart: y^i = A^{ij} <log p, eta_j>.
// Exact on the family since the statistics are centred; the L2
// projection coefficients otherwise.
inline Eigen::VectorXd expfam_recover_parameters(const ExponentialFamily& ef, const FiniteMeasure& P) {
    require_same_space(ef.space, P.space());
    const int d = static_cast<int>(ef.statistics.size());
    Eigen::VectorXd b(d);
    for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < P.size(); ++k)
            s += ef.space.weights()[k] * std::log(P.density()[k]) * ef.statistics[j][k];
        b[j] = s;
    }
    return ef.gram_inv * b;
}

// Linear family directly in the balanced chart: a~(y) = sum_i y^i eta_i.
inline ParametricFamily balanced_linear_build(const SampleSpace& space, std::vector<Vec> generators,
                                              std::optional<DomainBox> domain = std::nullopt) {
    const int d = static_cast<int>(generators.size());
    if (d == 0) throw DomainError("balanced linear family needs at least one generator");
    for (const Vec& eta : generators)
        if (eta.size() != space.size()) throw ShapeError("generator length does not match sample space");

    Eigen::MatrixXd gram(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < space.size(); ++k)
                s += space.weights()[k] * generators[i][k] * generators[j][k];
            gram(i, j) = s;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (!(es.eigenvalues().minCoeff() > 1e-12 * std::max(es.eigenvalues().maxCoeff(), 1e-300)))
        throw DependentGeneratorsError("generators are linearly dependent");

    const std::size_t n = space.size();
    auto gens = std::make_shared<const std::vector<Vec>>(std::move(generators));

    auto chart_map = [gens, n, d](const Eigen::VectorXd& y) {
        Vec a(n, 0.0);
        for (int j = 0; j < d; ++j)
            for (std::size_t k = 0; k < n; ++k) a[k] += y[j] * (*gens)[j][k];
        return a;
    };
    auto jacobian = [gens](const Eigen::VectorXd&) { return *gens; };
    auto hessian = [n, d](const Eigen::VectorXd&) {
        return std::vector<Vec>(static_cast<std::size_t>(d) * d, Vec(n, 0.0));
    };
    return ParametricFamily{space,
                            d,
                            domain ? std::move(*domain) : DomainBox::unbounded(d),
                            ParametricFamily::Membership::ambient,
                            chart_map,
                            jacobian,
                            hessian,
                            nullptr};
}

// Replaces a family's hessian by central differences of its jacobian;
// for prototyping families without analytic second derivatives.
inline ParametricFamily with_fd_hessian(ParametricFamily family, double step = 1e-4) {
    if (!(step > 0.0)) throw DomainError("fd hessian step must be > 0");
    auto jac = family.jacobian;
    const int d = family.dim;
    const std::size_t n = family.space.size();
    family.hessian = [jac, step, d, n](const Eigen::VectorXd& y) {
        std::vector<Vec> hess(static_cast<std::size_t>(d) * d, Vec(n, 0.0));
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXd yp = y, ym = y;
            yp[j] += step;
            ym[j] -= step;
            const std::vector<Vec> jp = jac(yp);
            const std::vector<Vec> jm = jac(ym);
            for (int i = 0; i < d; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    hess[i * d + j][k] = (jp[i][k] - jm[i][k]) / (2.0 * step);
        }
        // symmetrize: mixed FD of a C^2 chart commutes up to O(step^2)
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    const double v = 0.5 * (hess[i * d + j][k] + hess[j * d + i][k]);
                    hess[i * d + j][k] = v;
                    hess[j * d + i][k] = v;
                }
        return hess;
    };
    return family;
}

enum class TraceStatus { ok, out_of_domain };

struct GeodesicTrace {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;
    std::vector<Eigen::VectorXd> ydot;
    std::vector<double> metric_speed; // g_ij ydot^i ydot^j
    TraceStatus status = TraceStatus::ok;
};

// Classical fixed-step 4th-order integration of the geodesic equation
// yddot^k + Gamma^k_ij ydot^i ydot^j = 0.
inline GeodesicTrace geodesic(const ParametricFamily& family, const AlphaParam& alpha, const Eigen::VectorXd& y0,
                              const Eigen::VectorXd& ydot0, double t_end, double step,
                              const ToleranceConfig& cfg = {}) {
    detail::require_in_domain(family, y0, "geodesic");
    if (ydot0.size() != family.dim) throw ShapeError("initial velocity dimension mismatch");
    if (!(step > 0.0) || !(t_end > 0.0)) throw DomainError("geodesic needs positive step and t_end");

    const int d = family.dim;
    auto accel = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& v) {
        const ConnectionData conn = christoffel(family, y, alpha, cfg);
        Eigen::VectorXd a(d);
        for (int k = 0; k < d; ++k) a[k] = -v.dot(conn.christoffel[k] * v);
        return a;
    };

    const long nsteps = std::max<long>(1, std::lround(t_end / step));
    const double h = t_end / static_cast<double>(nsteps);

    GeodesicTrace trace;
    Eigen::VectorXd y = y0, v = ydot0;
    auto record = [&](double t) {
        trace.t.push_back(t);
        trace.y.push_back(y);
        trace.ydot.push_back(v);
        trace.metric_speed.push_back(v.dot(fisher_matrix(family, y, cfg).g * v));
    };
    record(0.0);

    for (long s = 0; s < nsteps; ++s) {
        try {
            const Eigen::VectorXd k1y = v, k1v = accel(y, v);
            const Eigen::VectorXd k2y = v + 0.5 * h * k1v, k2v = accel(y + 0.5 * h * k1y, v + 0.5 * h * k1v);
            const Eigen::VectorXd k3y = v + 0.5 * h * k2v, k3v = accel(y + 0.5 * h * k2y, v + 0.5 * h * k2v);
            const Eigen::VectorXd k4y = v + h * k3v, k4v = accel(y + h * k3y, v + h * k3v);
            y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        } catch (const OutOfDomainError&) {
            trace.status = TraceStatus::out_of_domain;
            return trace;
        }
        if (!family.domain.contains(y)) {
            trace.status = TraceStatus::out_of_domain;
            return trace;
        }
        record(h * static_cast<double>(s + 1));
    }
    return trace;
}

struct TransportTrace {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;
    std::vector<Eigen::VectorXd> u;
    std::vector<Eigen::VectorXd> v; // empty unless a dual vector is transported
    std::vector<double> conserved;  // u g v if dual, else u g u
    TraceStatus status = TraceStatus::ok;
};

// Transport of u along the curve with the alpha-connection:
// du^k/dt + Gamma_alpha^k_ij ydot^i u^j = 0. A second vector, when
// supplied, is transported with the dual (-alpha)-connection and the
// Fisher product u^i g_ij v^j is logged; it is conserved by the exact
// flow.
inline TransportTrace parallel_transport(const ParametricFamily& family, const AlphaParam& alpha,
                                         const std::function<Eigen::VectorXd(double)>& path,
                                         const std::function<Eigen::VectorXd(double)>& path_dot,
                                         const Eigen::VectorXd& u0, double t_end, double step,
                                         std::optional<Eigen::VectorXd> dual_v0 = std::nullopt,
                                         const ToleranceConfig& cfg = {}) {
    if (!(step > 0.0) || !(t_end > 0.0)) throw DomainError("parallel_transport needs positive step and t_end");
    if (u0.size() != family.dim) throw ShapeError("transported vector dimension mismatch");
    if (dual_v0 && dual_v0->size() != family.dim) throw ShapeError("dual vector dimension mismatch");
    detail::require_in_domain(family, path(0.0), "parallel_transport");

    const int d = family.dim;
    const AlphaParam neg = alpha.dual();
    auto rate = [&](double t, const Eigen::VectorXd& u, const AlphaParam& which) {
        const Eigen::VectorXd y = path(t);
        if (!family.domain.contains(y)) throw OutOfDomainError("parallel_transport: path leaves domain box");
        const ConnectionData conn = christoffel(family, y, which, cfg);
        const Eigen::VectorXd v = path_dot(t);
        Eigen::VectorXd out(d);
        for (int k = 0; k < d; ++k) out[k] = -v.dot(conn.christoffel[k] * u);
        return out;
    };

    const long nsteps = std::max<long>(1, std::lround(t_end / step));
    const double h = t_end / static_cast<double>(nsteps);

    TransportTrace trace;
    Eigen::VectorXd u = u0;
    Eigen::VectorXd v = dual_v0 ? *dual_v0 : Eigen::VectorXd();
    auto record = [&](double t) {
        trace.t.push_back(t);
        const Eigen::VectorXd y = path(t);
        trace.y.push_back(y);
        trace.u.push_back(u);
        const Eigen::MatrixXd g = fisher_matrix(family, y, cfg).g;
        if (dual_v0) {
            trace.v.push_back(v);
            trace.conserved.push_back(u.dot(g * v));
        } else {
            trace.conserved.push_back(u.dot(g * u));
        }
    };
    record(0.0);

    for (long s = 0; s < nsteps; ++s) {
        const double t = h * static_cast<double>(s);
        try {
            auto rk4 = [&](Eigen::VectorXd& x, const AlphaParam& which) {
                const Eigen::VectorXd k1 = rate(t, x, which);
                const Eigen::VectorXd k2 = rate(t + 0.5 * h, x + 0.5 * h * k1, which);
                const Eigen::VectorXd k3 = rate(t + 0.5 * h, x + 0.5 * h * k2, which);
                const Eigen::VectorXd k4 = rate(t + h, x + h * k3, which);
                x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            };
            rk4(u, alpha);
            if (dual_v0) rk4(v, neg);
        } catch (const OutOfDomainError&) {
            trace.status = TraceStatus::out_of_domain;
            return trace;
        }
        record(t + h);
    }
    return trace;
}

struct StepRule {
    double initial = 1.0;
    double backtrack = 0.5;
    double min_step = 1e-14;
    double grad_tol = 1e-10;
};

struct DescentStep {
    Eigen::VectorXd y;
    double objective;
    double grad_norm;
    double step_size;
};

struct DescentTrace {
    enum class Reason { converged, max_iterations, stalled };

    std::vector<DescentStep> steps;
    Reason reason = Reason::max_iterations;
};

// Minimizes y -> D_alpha(P_y | Q) by natural-gradient steps
// -g^{-1} grad with backtracking; the objective sequence is
// non-increasing by construction.
inline DescentTrace natural_gradient_descent(const ParametricFamily& family, const AlphaParam& alpha,
                                             const FiniteMeasure& target, const Eigen::VectorXd& y_init,
                                             const StepRule& rule = {}, int max_iters = 100,
                                             const ToleranceConfig& cfg = {}) {
    detail::require_in_domain(family, y_init, "natural_gradient_descent");
    require_same_space(family.space, target.space());
    if (max_iters < 0) throw DomainError("max_iters must be >= 0");

    const ChartVector bt = chart_forward(target);
    auto objective = [&](const Eigen::VectorXd& y) {
        const ChartVector at(family.space, family.chart_map(y));
        return divergence(alpha, chart_inverse(at, cfg), target);
    };
    auto gradient = [&](const Eigen::VectorXd& y) {
        const ChartVector at(family.space, family.chart_map(y));
        const std::vector<Vec> jac = family.jacobian(y);
        Eigen::VectorXd grad(family.dim);
        for (int i = 0; i < family.dim; ++i) {
            const Vec dirs[] = {jac[i]};
            grad[i] = divergence_derivative(alpha, at, bt, 1, 0, dirs, cfg);
        }
        return grad;
    };

    DescentTrace trace;
    Eigen::VectorXd y = y_init;
    double f = objective(y);
    for (int it = 0; it <= max_iters; ++it) {
        const Eigen::VectorXd grad = gradient(y);
        const double gnorm = grad.norm();
        trace.steps.push_back(DescentStep{y, f, gnorm, 0.0});
        if (gnorm <= rule.grad_tol) {
            trace.reason = DescentTrace::Reason::converged;
            return trace;
        }
        if (it == max_iters) break;

        const ConnectionData conn = fisher_matrix(family, y, cfg);
        const Eigen::VectorXd direction = -(conn.g_inv * grad);
        double t = rule.initial;
        bool accepted = false;
        while (t >= rule.min_step) {
            const Eigen::VectorXd candidate = y + t * direction;
            if (family.domain.contains(candidate)) {
                const double fc = objective(candidate);
                // strict decrease, except on the exact-zero plateau where
                // the objective has underflowed but the gradient has not
                if (fc < f || (fc == 0.0 && f == 0.0)) {
                    y = candidate;
                    f = fc;
                    trace.steps.back().step_size = t;
                    accepted = true;
                    break;
                }
            }
            t *= rule.backtrack;
        }
        if (!accepted) {
            trace.reason = DescentTrace::Reason::stalled;
            return trace;
        }
    }
    trace.reason = DescentTrace::Reason::max_iterations;
    return trace;
}

} // namespace igeo
