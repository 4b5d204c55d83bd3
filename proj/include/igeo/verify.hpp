#pragma once

// Seeded sweep over every identity and inequality the library promises:
// kernel inversion, chart bijections, divergence axioms, the
// finite-difference cross-checks of the metric and connection formulas,
// duality and decomposition of the alpha-derivatives, the closed-form
// exponential-family symbols, and the dynamics sanity checks. One result
// row per invariant; a row passes when its max observed violation stays
// within tolerance.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "igeo/divergence_geometry.hpp"
#include "igeo/measure_core.hpp"
#include "igeo/prob_chart.hpp"
#include "igeo/random.hpp"
#include "igeo/scalar_kernels.hpp"
#include "igeo/submanifolds.hpp"

namespace igeo {

struct VerifyConfig {
    std::uint64_t seed = 0;
    int space_size = 8;
    int samples = 1000;
    int inequality_samples = 10000;
    std::optional<double> tolerance_override;
    double tolerance_scale = 1.0;
};

struct InvariantResult {
    std::string name;
    long samples = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

struct InvariantCheck {
    std::string name;
    double tolerance;
    std::function<std::pair<double, long>(Rng&, const VerifyConfig&)> run;
};

inline void track(double& worst, double candidate) {
    if (candidate > worst) worst = candidate;
}

inline Vec scale_add(const Vec& base, double h, const Vec& dir) {
    Vec out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + h * dir[i];
    return out;
}

inline FiniteMeasure unit_measure(const SampleSpace& space) {
    return FiniteMeasure(space, Vec(space.size(), 1.0));
}

inline ExponentialFamily two_point_family() {
    const SampleSpace space(Vec{0.5, 0.5});
    DomainBox box;
    box.lo = Eigen::VectorXd::Constant(1, -5.0);
    box.hi = Eigen::VectorXd::Constant(1, 5.0);
    return expfam_build(space, {Vec{1.0, -1.0}}, box);
}

inline ExponentialFamily seeded_family_2d(Rng& rng, int n) {
    const SampleSpace space = random_space(rng, static_cast<std::size_t>(n));
    std::vector<Vec> stats;
    for (int j = 0; j < 2; ++j) {
        Vec eta = random_vector(rng, space.size(), -1.0, 1.0);
        for (int pass = 0; pass < 2; ++pass) {
            const double mean = expectation(space, eta);
            for (double& x : eta) x -= mean;
        }
        stats.push_back(std::move(eta));
    }
    DomainBox box;
    box.lo = Eigen::VectorXd::Constant(2, -3.0);
    box.hi = Eigen::VectorXd::Constant(2, 3.0);
    return expfam_build(space, std::move(stats), box);
}

// E_P products of centred statistics; the moment-form oracle for the
// exponential-family metric and connection.
inline double central_moment(const ExponentialFamily& ef, const Vec& p, std::initializer_list<int> indices) {
    const Vec& w = ef.space.weights();
    const std::size_t n = ef.space.size();
    std::vector<double> means;
    for (int idx : indices) {
        double m = 0.0;
        for (std::size_t k = 0; k < n; ++k) m += w[k] * p[k] * ef.statistics[idx][k];
        means.push_back(m);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double prod = p[k];
        std::size_t slot = 0;
        for (int idx : indices) prod *= ef.statistics[idx][k] - means[slot++];
        acc += w[k] * prod;
    }
    return acc;
}

// Polynomial ambient field c0 + c1.*a~ + c2.*a~^2 with its exact
// directional derivative.
inline VectorField polynomial_ambient_field(Vec c0, Vec c1, Vec c2) {
    auto shared0 = std::make_shared<const Vec>(std::move(c0));
    auto shared1 = std::make_shared<const Vec>(std::move(c1));
    auto shared2 = std::make_shared<const Vec>(std::move(c2));
    VectorField field;
    field.domain = VectorField::Domain::ambient;
    field.value = [shared0, shared1, shared2](const FiniteMeasure& P) {
        const Vec a = chart_forward(P).values();
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = (*shared0)[i] + (*shared1)[i] * a[i] + (*shared2)[i] * a[i] * a[i];
        return out;
    };
    field.directional_derivative = [shared1, shared2](const FiniteMeasure& P, const Vec& dir) {
        const Vec a = chart_forward(P).values();
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = ((*shared1)[i] + 2.0 * (*shared2)[i] * a[i]) * dir[i];
        return out;
    };
    return field;
}

// Polynomial on-manifold field centred in the phi chart, with its exact
// directional derivative (the phi chart is linear along tangent curves).
inline VectorField polynomial_m_field(Vec c0, Vec c1, Vec c2) {
    auto shared0 = std::make_shared<const Vec>(std::move(c0));
    auto shared1 = std::make_shared<const Vec>(std::move(c1));
    auto shared2 = std::make_shared<const Vec>(std::move(c2));
    auto raw = [shared0, shared1, shared2](const SampleSpace& space, const Vec& a) {
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = (*shared0)[i] + (*shared1)[i] * a[i] + (*shared2)[i] * a[i] * a[i];
        return center_values(space, std::move(out)).values();
    };
    VectorField field;
    field.domain = VectorField::Domain::on_manifold;
    field.value = [raw](const FiniteMeasure& P) { return raw(P.space(), phi_forward(P).values()); };
    field.directional_derivative = [shared1, shared2](const FiniteMeasure& P, const Vec& dir) {
        const Vec a = phi_forward(P).values();
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            out[i] = ((*shared1)[i] + 2.0 * (*shared2)[i] * a[i]) * dir[i];
        return center_values(P.space(), std::move(out)).values();
    };
    return field;
}

// Ambient extension of an on-manifold field: evaluate at the projected
// point and push forward with D rho.
inline VectorField ambient_extension(const VectorField& m_field) {
    auto value = m_field.value;
    VectorField field;
    field.domain = VectorField::Domain::ambient;
    field.value = [value](const FiniteMeasure& P) {
        const CenteredChartVector a = center(chart_forward(P));
        const FiniteMeasure projected = phi_inverse(a);
        const Vec u = value(projected);
        return d_rho(a, CenteredChartVector(a.space(), u));
    };
    return field;
}

inline std::vector<InvariantCheck> build_invariant_checks() {
    std::vector<InvariantCheck> checks;
    const std::vector<double> alpha_grid{-1.0, -0.9, -0.5, 0.0, 0.5, 0.9, 1.0};
    const std::vector<double> alpha_interior{-0.9, -0.5, 0.0, 0.5, 0.9};

    checks.push_back({"kernel_round_trip", 1e-12, [](Rng&, const VerifyConfig&) {
        double worst = 0.0;
        long count = 0;
        for (double z = -50.0; z <= 50.0 + 1e-9; z += 0.1) {
            track(worst, std::abs(theta(psi(z)) - z));
            ++count;
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"psi_derivative_in_unit_interval", 0.0, [](Rng&, const VerifyConfig&) {
        double worst = 0.0;
        long count = 0;
        for (double z = -50.0; z <= 50.0 + 1e-9; z += 0.1) {
            const double d = psi_deriv(z, 1);
            track(worst, std::max(-d, d - 1.0));
            ++count;
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"psi_derivative_fd_consistency", 1e-6, [](Rng&, const VerifyConfig&) {
        const double h = 1e-4;
        double worst = 0.0;
        long count = 0;
        for (double z = -50.0; z <= 50.0 + 1e-9; z += 0.1) {
            for (int order = 1; order <= 4; ++order) {
                auto lower = [order](double x) { return order == 1 ? psi(x) : psi_deriv(x, order - 1); };
                const double fd = (lower(z + h) - lower(z - h)) / (2.0 * h);
                track(worst, std::abs(psi_deriv(z, order) - fd));
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"xi_alpha_identity_and_monotonicity", 0.0, [](Rng&, const VerifyConfig&) {
        const std::vector<double> alphas{-1.0, -0.5, 0.0, 0.5, 1.0};
        double worst = 0.0;
        long count = 0;
        double prev_z = -20.0;
        std::vector<double> prev(alphas.size());
        for (std::size_t j = 0; j < alphas.size(); ++j) prev[j] = xi_alpha(AlphaParam(alphas[j]), prev_z, 0);
        for (double z = -19.75; z <= 20.0 + 1e-9; z += 0.25) {
            track(worst, std::abs(xi_alpha(AlphaParam(-1.0), z, 0) - psi(z)));
            for (std::size_t j = 0; j < alphas.size(); ++j) {
                const double cur = xi_alpha(AlphaParam(alphas[j]), z, 0);
                track(worst, prev[j] - cur); // must increase strictly
                prev[j] = cur;
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"chart_round_trip", 1e-10, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const Vec a = random_vector(rng, space.size(), -10.0, 10.0);
            const ChartVector at(space, a);
            const Vec back = chart_forward(chart_inverse(at)).values();
            for (std::size_t i = 0; i < a.size(); ++i) track(worst, std::abs(back[i] - a[i]));
            const FiniteMeasure P = random_finite_measure(rng, space);
            const Vec p2 = chart_inverse(chart_forward(P)).density();
            for (std::size_t i = 0; i < p2.size(); ++i) track(worst, std::abs(p2[i] - P.density()[i]));
        }
        return std::pair{worst, static_cast<long>(cfg.samples)};
    }});

    checks.push_back({"centred_chart_round_trip", 1e-10, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const CenteredChartVector a = center_values(space, random_vector(rng, space.size(), -2.0, 2.0));
            const Vec back = phi_forward(phi_inverse(a)).values();
            for (std::size_t i = 0; i < back.size(); ++i) track(worst, std::abs(back[i] - a.values()[i]));
            const FiniteMeasure P = random_probability_measure(rng, space);
            const Vec p2 = phi_inverse(phi_forward(P)).density();
            for (std::size_t i = 0; i < p2.size(); ++i) track(worst, std::abs(p2[i] - P.density()[i]));
        }
        return std::pair{worst, static_cast<long>(cfg.samples)};
    }});

    checks.push_back({"normalization_residual", 1e-12, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const CenteredChartVector a = center_values(space, random_vector(rng, space.size(), -2.0, 2.0));
            const Vec at = rho(a).values();
            double mass = 0.0;
            for (std::size_t i = 0; i < at.size(); ++i) mass += space.weights()[i] * psi(at[i]);
            track(worst, std::abs(mass - 1.0));
        }
        return std::pair{worst, static_cast<long>(cfg.samples)};
    }});

    checks.push_back({"l2_embedding_identity", 1e-12, [alpha_interior](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        const Vec& w = space.weights();
        double worst = 0.0;
        long count = 0;
        const int pairs = std::max(1, cfg.samples / 10);
        for (int s = 0; s < pairs; ++s) {
            const FiniteMeasure P = random_finite_measure(rng, space);
            const FiniteMeasure Q = random_finite_measure(rng, space);
            for (double al : alpha_interior) {
                const AlphaParam alpha(al);
                const Vec fa = alpha_embed(alpha, P);
                const Vec fb = alpha_embed(alpha.dual(), Q);
                double lhs = 0.0, rhs = 0.0;
                const double beta = 0.5 * (1.0 - al);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    lhs += w[i] * fa[i] * fb[i];
                    rhs += w[i] * std::pow(P.density()[i], beta) * std::pow(Q.density()[i], 1.0 - beta);
                }
                rhs *= 4.0 / (1.0 - al * al);
                track(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1.0));
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"embedding_endpoints_exact", 0.0, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        const int pairs = std::max(1, cfg.samples / 10);
        for (int s = 0; s < pairs; ++s) {
            const FiniteMeasure P = random_finite_measure(rng, space);
            const Vec fm = alpha_embed(AlphaParam(-1.0), P);
            const Vec fp = alpha_embed(AlphaParam(1.0), P);
            for (std::size_t i = 0; i < fm.size(); ++i) {
                track(worst, std::abs(fm[i] - P.density()[i]));
                track(worst, std::abs(fp[i] - std::log(P.density()[i])));
            }
        }
        return std::pair{worst, static_cast<long>(std::max(1, cfg.samples / 10))};
    }});

    checks.push_back({"relative_entropy_bound", 0.0, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        const FiniteMeasure mu = unit_measure(space);
        double worst = 0.0;
        for (int s = 0; s < cfg.inequality_samples; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space);
            const CenteredChartVector a = phi_forward(P);
            const double lhs = divergence(AlphaParam(-1.0), P, mu) + divergence(AlphaParam(1.0), P, mu);
            const double rhs = 0.5 * lp_norm(space, a.values(), 2.0) * lp_norm(space, a.values(), 2.0);
            track(worst, lhs - rhs);
        }
        return std::pair{worst, static_cast<long>(cfg.inequality_samples)};
    }});

    checks.push_back({"log_density_bound", 0.0, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        const FiniteMeasure mu = unit_measure(space);
        double worst = 0.0;
        for (int s = 0; s < cfg.inequality_samples; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space);
            const Vec& p = P.density();
            double mean_psi1 = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) mean_psi1 += space.weights()[i] * p[i] / (1.0 + p[i]);
            const double lhs = -std::log(mean_psi1);
            const double rhs = divergence(AlphaParam(1.0), P, mu) + std::log(2.0);
            track(worst, lhs - rhs);
        }
        return std::pair{worst, static_cast<long>(cfg.inequality_samples)};
    }});

    checks.push_back({"fisher_dominated_by_l2", 0.0, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.inequality_samples; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space);
            const Vec u = random_vector(rng, space.size(), -1.0, 1.0);
            double l2 = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) l2 += space.weights()[i] * u[i] * u[i];
            track(worst, fisher_inner(P, u, u) - l2);
        }
        return std::pair{worst, static_cast<long>(cfg.inequality_samples)};
    }});

    checks.push_back({"d_rho_orthogonality", 1e-12, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const CenteredChartVector a = center_values(space, random_vector(rng, space.size(), -2.0, 2.0));
            const CenteredChartVector u = center_values(space, random_vector(rng, space.size(), -1.0, 1.0));
            const Vec du = d_rho(a, u);
            const Vec at = rho(a).values();
            double acc = 0.0;
            for (std::size_t i = 0; i < du.size(); ++i) {
                const double p = psi(at[i]);
                acc += space.weights()[i] * p / (1.0 + p) * du[i];
            }
            track(worst, std::abs(acc));
        }
        return std::pair{worst, static_cast<long>(cfg.samples)};
    }});

    checks.push_back({"d_rho_left_inverse", 1e-12, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const CenteredChartVector a = center_values(space, random_vector(rng, space.size(), -2.0, 2.0));
            const CenteredChartVector u = center_values(space, random_vector(rng, space.size(), -1.0, 1.0));
            const Vec rec = center_values(space, d_rho(a, u)).values();
            for (std::size_t i = 0; i < rec.size(); ++i) track(worst, std::abs(rec[i] - u.values()[i]));
        }
        return std::pair{worst, static_cast<long>(cfg.samples)};
    }});

    checks.push_back({"d_rho_fd", 1e-8, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        const double h = 1e-5;
        double worst = 0.0;
        const int count = std::max(1, cfg.samples / 20);
        for (int s = 0; s < count; ++s) {
            const Vec base = random_vector(rng, space.size(), -2.0, 2.0);
            const Vec dir = random_vector(rng, space.size(), -1.0, 1.0);
            const CenteredChartVector a = center_values(space, base);
            const CenteredChartVector u = center_values(space, dir);
            const Vec plus = rho(center_values(space, scale_add(a.values(), h, u.values()))).values();
            const Vec minus = rho(center_values(space, scale_add(a.values(), -h, u.values()))).values();
            const Vec analytic = d_rho(a, u);
            for (std::size_t i = 0; i < analytic.size(); ++i)
                track(worst, std::abs((plus[i] - minus[i]) / (2.0 * h) - analytic[i]));
        }
        return std::pair{worst, static_cast<long>(count)};
    }});

    checks.push_back({"d2_rho_fd_and_symmetry", 1e-5, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        const double h = 1e-4;
        double worst = 0.0;
        const int count = std::max(1, cfg.samples / 50);
        for (int s = 0; s < count; ++s) {
            const CenteredChartVector a = center_values(space, random_vector(rng, space.size(), -2.0, 2.0));
            const CenteredChartVector u = center_values(space, random_vector(rng, space.size(), -1.0, 1.0));
            const CenteredChartVector v = center_values(space, random_vector(rng, space.size(), -1.0, 1.0));
            const Vec analytic = d2_rho(a, u, v);
            const Vec swapped = d2_rho(a, v, u);
            auto shifted = [&](double su, double sv) {
                Vec vals = a.values();
                for (std::size_t i = 0; i < vals.size(); ++i)
                    vals[i] += su * h * u.values()[i] + sv * h * v.values()[i];
                return rho(center_values(space, std::move(vals))).values();
            };
            const Vec pp = shifted(1, 1), pm = shifted(1, -1), mp = shifted(-1, 1), mm = shifted(-1, -1);
            for (std::size_t i = 0; i < analytic.size(); ++i) {
                const double fd = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
                track(worst, std::abs(fd - analytic[i]));
                track(worst, std::abs(analytic[i] - swapped[i]));
            }
        }
        return std::pair{worst, static_cast<long>(count)};
    }});

    checks.push_back({"tangent_split_reconstruction", 1e-12, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space);
            const Vec dir = random_vector(rng, space.size(), -2.0, 2.0);
            const TangentSplit split = tangent_split(P, dir);
            const CenteredChartVector a = phi_forward(P);
            const Vec tangent = d_rho(a, split.m_part);
            const Vec& p = P.density();
            for (std::size_t i = 0; i < dir.size(); ++i) {
                const double rebuilt = tangent[i] + split.complement * p[i] / (1.0 + p[i]);
                track(worst, std::abs(rebuilt - dir[i]));
            }
        }
        return std::pair{worst, static_cast<long>(cfg.samples)};
    }});

    checks.push_back({"divergence_axioms", 1e-12, [alpha_grid](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        long count = 0;
        for (int s = 0; s < cfg.samples; ++s) {
            const FiniteMeasure P = random_finite_measure(rng, space);
            const FiniteMeasure Q = random_finite_measure(rng, space);
            double gap = 0.0;
            for (std::size_t i = 0; i < P.size(); ++i)
                gap = std::max(gap, std::abs(P.density()[i] - Q.density()[i]));
            for (double al : alpha_grid) {
                const AlphaParam alpha(al);
                const double dpq = divergence(alpha, P, Q);
                track(worst, -dpq);
                track(worst, std::abs(dpq - divergence(alpha.dual(), Q, P)));
                track(worst, divergence(alpha, P, P));
                if (gap > 1e-6 && dpq <= 1e-12) track(worst, 1.0); // indiscernibles failed
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"divergence_kernel_route", 1e-12, [alpha_grid](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        long count = 0;
        const int pairs = std::max(1, cfg.samples / 10);
        for (int s = 0; s < pairs; ++s) {
            const FiniteMeasure P = random_finite_measure(rng, space);
            const FiniteMeasure Q = random_finite_measure(rng, space);
            const ChartVector at = chart_forward(P);
            const ChartVector bt = chart_forward(Q);
            for (double al : alpha_grid) {
                const AlphaParam alpha(al);
                track(worst, std::abs(divergence_via_kernels(alpha, at, bt) - divergence(alpha, P, Q)));
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"fisher_fd_alpha_independence", 1e-6, [](Rng& rng, const VerifyConfig& cfg) {
        const std::vector<double> alphas{-1.0, -0.5, 0.0, 0.5, 1.0};
        const SampleSpace space = random_space(rng, cfg.space_size);
        const double h = 1e-4;
        double worst = 0.0;
        long count = 0;
        const int points = 10;
        for (int s = 0; s < points; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space);
            const ChartVector at = chart_forward(P);
            const Vec u = random_vector(rng, space.size(), -1.0, 1.0);
            const Vec v = random_vector(rng, space.size(), -1.0, 1.0);
            const double closed = fisher_inner(P, u, v);
            // natural scale of the bilinear form for the relative error
            const double scale = std::sqrt(fisher_inner(P, u, u) * fisher_inner(P, v, v));
            const FiniteMeasure Pp = chart_inverse(ChartVector(space, scale_add(at.values(), h, u)));
            const FiniteMeasure Pm = chart_inverse(ChartVector(space, scale_add(at.values(), -h, u)));
            const FiniteMeasure Qp = chart_inverse(ChartVector(space, scale_add(at.values(), h, v)));
            const FiniteMeasure Qm = chart_inverse(ChartVector(space, scale_add(at.values(), -h, v)));
            std::vector<double> fds;
            for (double al : alphas) {
                const AlphaParam alpha(al);
                const double fd = (divergence(alpha, Pp, Qp) - divergence(alpha, Pp, Qm)
                                   - divergence(alpha, Pm, Qp) + divergence(alpha, Pm, Qm))
                                / (4.0 * h * h);
                fds.push_back(fd);
                track(worst, std::abs(-fd - closed) / scale);
                ++count;
            }
            for (std::size_t i = 1; i < fds.size(); ++i) track(worst, std::abs(fds[i] - fds[0]) / scale);
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"third_derivative_fd", 1e-5, [](Rng& rng, const VerifyConfig& cfg) {
        const std::vector<double> alphas{-1.0, -0.5, 0.0, 0.5, 1.0};
        const SampleSpace space = random_space(rng, cfg.space_size);
        const double h = 1e-3;
        double worst = 0.0;
        long count = 0;
        const int points = 5;
        for (int s = 0; s < points; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space);
            const ChartVector at = chart_forward(P);
            const Vec u = random_vector(rng, space.size(), -1.0, 1.0);
            const Vec v = random_vector(rng, space.size(), -1.0, 1.0);
            const Vec w = random_vector(rng, space.size(), -1.0, 1.0);
            for (double al : alphas) {
                const AlphaParam alpha(al);
                const Vec dirs[] = {u, v, w};
                const double closed = divergence_derivative(alpha, at, at, 2, 1, dirs);
                double fd = 0.0;
                for (int su : {1, -1})
                    for (int sv : {1, -1})
                        for (int sw : {1, -1}) {
                            Vec first = at.values();
                            for (std::size_t i = 0; i < first.size(); ++i)
                                first[i] += su * h * u[i] + sv * h * v[i];
                            const FiniteMeasure Pa = chart_inverse(ChartVector(space, std::move(first)));
                            const FiniteMeasure Qb =
                                chart_inverse(ChartVector(space, scale_add(at.values(), sw * h, w)));
                            fd += su * sv * sw * divergence(alpha, Pa, Qb);
                        }
                fd /= 8.0 * h * h * h;
                track(worst, std::abs(fd - closed));
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"codual_residual", 1e-8, [](Rng& rng, const VerifyConfig& cfg) {
        const std::vector<double> alphas{-1.0, -0.5, 0.0, 0.5, 1.0};
        const SampleSpace space = random_space(rng, cfg.space_size);
        ToleranceConfig tol;
        tol.fd_step = 1e-5;
        double worst = 0.0;
        long count = 0;
        const int points = 5;
        for (int s = 0; s < points; ++s) {
            const FiniteMeasure P = random_finite_measure(rng, space, 1.5);
            const auto coeff = [&] { return random_vector(rng, space.size(), -0.5, 0.5); };
            const VectorField U = polynomial_ambient_field(coeff(), coeff(), coeff());
            const VectorField V = polynomial_ambient_field(coeff(), coeff(), coeff());
            const VectorField W = polynomial_ambient_field(coeff(), coeff(), coeff());
            for (double al : alphas) {
                track(worst, duality_residual(AlphaParam(al), U, V, W, P, tol));
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"ambient_decomposition", 1e-8, [](Rng& rng, const VerifyConfig& cfg) {
        const std::vector<double> alphas{-1.0, -0.5, 0.0, 0.5, 1.0};
        const SampleSpace space = random_space(rng, cfg.space_size);
        ToleranceConfig tol;
        tol.fd_step = 1e-5;
        double worst = 0.0;
        long count = 0;
        const int points = 5;
        for (int s = 0; s < points; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space, 1.5);
            const auto coeff = [&] { return random_vector(rng, space.size(), -0.5, 0.5); };
            const VectorField Um = polynomial_m_field(coeff(), coeff(), coeff());
            const VectorField Vm = polynomial_m_field(coeff(), coeff(), coeff());
            const VectorField Ua = ambient_extension(Um);
            const VectorField Va = ambient_extension(Vm);
            const CenteredChartVector a = phi_forward(P);
            const Vec u = Um.value(P);
            const Vec v = Vm.value(P);
            const Vec du = d_rho(a, CenteredChartVector(space, u));
            const Vec dv = d_rho(a, CenteredChartVector(space, v));
            const double inner = fisher_inner(P, du, dv);
            const Vec& p = P.density();
            for (double al : alphas) {
                const AlphaParam alpha(al);
                const Vec lhs = alpha_derivative_ambient(alpha, Ua, Va, P, tol).direction();
                const Vec m_dir = alpha_derivative_m(alpha, Um, Vm, P, tol).direction;
                const Vec pushed = d_rho(a, center_values(space, m_dir));
                for (std::size_t i = 0; i < lhs.size(); ++i) {
                    const double rhs = pushed[i] - 0.5 * (1.0 + al) * (1.0 + p[i]) * inner;
                    track(worst, std::abs(lhs[i] - rhs));
                }
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"correction_fisher_orthogonal", 1e-12, [](Rng& rng, const VerifyConfig& cfg) {
        const SampleSpace space = random_space(rng, cfg.space_size);
        double worst = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const FiniteMeasure P = random_probability_measure(rng, space);
            const CenteredChartVector a = phi_forward(P);
            const CenteredChartVector w = center_values(space, random_vector(rng, space.size(), -1.0, 1.0));
            const Vec dw = d_rho(a, w);
            Vec correction(space.size());
            for (std::size_t i = 0; i < correction.size(); ++i) correction[i] = 1.0 + P.density()[i];
            track(worst, std::abs(fisher_inner(P, correction, dw)));
        }
        return std::pair{worst, static_cast<long>(cfg.samples)};
    }});

    checks.push_back({"expfam_fisher_covariance", 1e-10, [](Rng& rng, const VerifyConfig& cfg) {
        double worst = 0.0;
        long count = 0;
        {
            const ExponentialFamily ef = two_point_family();
            const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
            Eigen::VectorXd y1(1);
            y1 << 1.0;
            track(worst, std::abs(fisher_matrix(ef.family, y0).g(0, 0) - 1.0));
            const double expected = 1.0 - std::tanh(1.0) * std::tanh(1.0);
            track(worst, std::abs(fisher_matrix(ef.family, y1).g(0, 0) - expected));
        }
        const ExponentialFamily ef = seeded_family_2d(rng, cfg.space_size);
        for (int s = 0; s < 20; ++s) {
            Eigen::VectorXd y(2);
            y << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
            const Eigen::MatrixXd g = fisher_matrix(ef.family, y).g;
            const Vec p = ef.family.density_map(y);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    track(worst, std::abs(g(i, j) - central_moment(ef, p, {i, j})));
            ++count;
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"expfam_christoffel_moments", 1e-8, [](Rng& rng, const VerifyConfig& cfg) {
        const std::vector<double> alphas{-1.0, -0.5, 0.0, 0.5, 1.0};
        double worst = 0.0;
        long count = 0;
        {
            const ExponentialFamily ef = two_point_family();
            const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
            for (double al : alphas)
                track(worst, std::abs(christoffel(ef.family, y0, AlphaParam(al)).christoffel[0](0, 0)));
        }
        const ExponentialFamily ef = seeded_family_2d(rng, cfg.space_size);
        for (int s = 0; s < 10; ++s) {
            Eigen::VectorXd y(2);
            y << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
            const Vec p = ef.family.density_map(y);
            const Eigen::MatrixXd g_inv = fisher_matrix(ef.family, y).g_inv;
            for (double al : alphas) {
                const ConnectionData conn = christoffel(ef.family, y, AlphaParam(al));
                for (int k = 0; k < 2; ++k)
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            double expected = 0.0;
                            for (int l = 0; l < 2; ++l)
                                expected += g_inv(k, l) * central_moment(ef, p, {i, j, l});
                            expected *= 0.5 * (1.0 - al);
                            track(worst, std::abs(conn.christoffel[k](i, j) - expected));
                        }
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"christoffel_fd", 1e-4, [](Rng& rng, const VerifyConfig& cfg) {
        const std::vector<double> alphas{-1.0, 0.0, 1.0};
        const ExponentialFamily ef = seeded_family_2d(rng, cfg.space_size);
        const double h = 1e-3;
        double worst = 0.0;
        long count = 0;
        for (int s = 0; s < 3; ++s) {
            Eigen::VectorXd y(2);
            y << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
            for (double al : alphas) {
                const AlphaParam alpha(al);
                auto K = [&](const Eigen::VectorXd& ya, const Eigen::VectorXd& yb) {
                    const FiniteMeasure Pa(ef.space, ef.family.density_map(ya));
                    const FiniteMeasure Pb(ef.space, ef.family.density_map(yb));
                    return divergence(alpha, Pa, Pb);
                };
                const ConnectionData conn = christoffel(ef.family, y, alpha);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k) {
                            double fd_sum = 0.0;
                            for (int l = 0; l < 2; ++l) {
                                double t = 0.0;
                                for (int si : {1, -1})
                                    for (int sj : {1, -1})
                                        for (int sl : {1, -1}) {
                                            Eigen::VectorXd ya = y, yb = y;
                                            ya[i] += si * h;
                                            ya[j] += sj * h;
                                            yb[l] += sl * h;
                                            t += si * sj * sl * K(ya, yb);
                                        }
                                t /= 8.0 * h * h * h;
                                fd_sum += conn.g_inv(k, l) * t;
                            }
                            track(worst, std::abs(-fd_sum - conn.christoffel[k](i, j)));
                        }
                ++count;
            }
        }
        return std::pair{worst, count};
    }});

    checks.push_back({"geodesic_alpha1_affine", 1e-10, [](Rng&, const VerifyConfig&) {
        const ExponentialFamily ef = two_point_family();
        Eigen::VectorXd y0(1), v0(1);
        y0 << 0.3;
        v0 << 0.5;
        const GeodesicTrace trace = geodesic(ef.family, AlphaParam(1.0), y0, v0, 1.0, 1e-3);
        double worst = 0.0;
        for (std::size_t i = 0; i < trace.t.size(); ++i)
            track(worst, std::abs(trace.y[i][0] - (0.3 + 0.5 * trace.t[i])));
        return std::pair{worst, static_cast<long>(trace.t.size())};
    }});

    checks.push_back({"integrator_fourth_order", 0.0, [](Rng&, const VerifyConfig&) {
        const ExponentialFamily ef = two_point_family();
        Eigen::VectorXd y0(1), v0(1);
        y0 << 0.2;
        v0 << 0.8;
        const AlphaParam alpha(0.0);
        auto terminal = [&](double step) { return geodesic(ef.family, alpha, y0, v0, 1.0, step).y.back()[0]; };
        const double ref = terminal(1e-4);
        const double e1 = std::abs(terminal(0.02) - ref);
        const double e2 = std::abs(terminal(0.01) - ref);
        const double order = std::log2(e1 / e2);
        return std::pair{std::max(0.0, 3.5 - order), 2L};
    }});

    checks.push_back({"dual_transport_conserved", 1e-6, [](Rng&, const VerifyConfig&) {
        const ExponentialFamily ef = two_point_family();
        auto path = [](double t) { return Eigen::VectorXd::Constant(1, -0.5 + 1.2 * t); };
        auto path_dot = [](double) { return Eigen::VectorXd::Constant(1, 1.2); };
        Eigen::VectorXd u0(1), v0(1);
        u0 << 1.0;
        v0 << 0.7;
        double worst = 0.0;
        for (double al : {0.5, 1.0, -0.3}) {
            const TransportTrace trace =
                parallel_transport(ef.family, AlphaParam(al), path, path_dot, u0, 1.0, 1e-3, v0);
            for (double c : trace.conserved) track(worst, std::abs(c - trace.conserved.front()));
        }
        return std::pair{worst, 3L};
    }});

    checks.push_back({"self_transport_alpha0_norm", 1e-8, [](Rng&, const VerifyConfig&) {
        const ExponentialFamily ef = two_point_family();
        auto path = [](double t) { return Eigen::VectorXd::Constant(1, -0.5 + 1.2 * t); };
        auto path_dot = [](double) { return Eigen::VectorXd::Constant(1, 1.2); };
        Eigen::VectorXd u0(1);
        u0 << 1.0;
        const TransportTrace trace = parallel_transport(ef.family, AlphaParam(0.0), path, path_dot, u0, 1.0, 1e-3);
        double worst = 0.0;
        for (double c : trace.conserved) track(worst, std::abs(c - trace.conserved.front()));
        return std::pair{worst, static_cast<long>(trace.t.size())};
    }});

    checks.push_back({"ngd_in_family_convergence", 1e-12, [](Rng&, const VerifyConfig&) {
        const ExponentialFamily ef = two_point_family();
        Eigen::VectorXd y_target(1), y_init(1);
        y_target << 0.7;
        y_init << -0.5;
        const FiniteMeasure Q(ef.space, ef.family.density_map(y_target));
        double worst = 0.0;
        for (double al : {-1.0, 0.0, 0.9}) {
            const DescentTrace trace =
                natural_gradient_descent(ef.family, AlphaParam(al), Q, y_init, StepRule{}, 200);
            track(worst, trace.steps.back().objective);
        }
        return std::pair{worst, 3L};
    }});

    return checks;
}

} // namespace detail

inline std::vector<InvariantResult> run_invariant_suite(const VerifyConfig& cfg) {
    const std::vector<detail::InvariantCheck> checks = detail::build_invariant_checks();
    std::vector<InvariantResult> results;
    results.reserve(checks.size());
    std::uint64_t salt = 0x9E3779B97F4A7C15ULL;
    for (const auto& check : checks) {
        Rng rng(cfg.seed ^ salt);
        salt = salt * 6364136223846793005ULL + 1442695040888963407ULL;
        InvariantResult res;
        res.name = check.name;
        res.tolerance = cfg.tolerance_override ? *cfg.tolerance_override : check.tolerance * cfg.tolerance_scale;
        const auto [violation, samples] = check.run(rng, cfg);
        res.max_violation = violation;
        res.samples = samples;
        res.pass = violation <= res.tolerance;
        results.push_back(std::move(res));
    }
    return results;
}

inline bool all_invariants_pass(const std::vector<InvariantResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace igeo
