#pragma once

// Finite sample spaces, strictly positive measures, the balanced chart
// a~ = p + log p with its inverse, norms, expectations, and the
// alpha-embeddings F_alpha.

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "igeo/errors.hpp"
#include "igeo/scalar_kernels.hpp"

namespace igeo {

using Vec = std::vector<double>;

// A finite base space with strictly positive probability weights.
// Copies share identity; measures keyed to different spaces never mix.
class SampleSpace {
  public:
    explicit SampleSpace(Vec weights) : data_(std::make_shared<const Data>(Data{std::move(weights)})) {
        const Vec& w = data_->weights;
        if (w.empty()) throw DomainError("sample space needs at least one atom");
        double sum = 0.0;
        for (double wi : w) {
            if (!(wi > 0.0) || !std::isfinite(wi)) throw DomainError("weights must be strictly positive and finite");
            sum += wi;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw DomainError("weights must sum to one");
    }

    std::size_t size() const { return data_->weights.size(); }
    const Vec& weights() const { return data_->weights; }

    friend bool operator==(const SampleSpace& a, const SampleSpace& b) { return a.data_ == b.data_; }
    friend bool operator!=(const SampleSpace& a, const SampleSpace& b) { return !(a == b); }

  private:
    struct Data {
        Vec weights;
    };
    std::shared_ptr<const Data> data_;
};

inline void require_same_space(const SampleSpace& a, const SampleSpace& b) {
    if (!(a == b)) throw ShapeError("operands live on different sample spaces");
}

inline double expectation(const SampleSpace& space, std::span<const double> f) {
    if (f.size() != space.size()) throw ShapeError("vector length does not match sample space");
    const Vec& w = space.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
    return s;
}

inline double lp_norm(const SampleSpace& space, std::span<const double> f, double r) {
    if (!(r >= 1.0)) throw DomainError("lp_norm requires r >= 1");
    if (f.size() != space.size()) throw ShapeError("vector length does not match sample space");
    const Vec& w = space.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f[i]), r);
    return std::pow(s, 1.0 / r);
}

inline double sup_norm(std::span<const double> f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

// A strictly positive density with respect to the space's weights.
// Entries below 1e-300 are rejected rather than clamped; clamping would
// silently corrupt the divergence identities.
class FiniteMeasure {
  public:
    FiniteMeasure(SampleSpace space, Vec density) : space_(std::move(space)), density_(std::move(density)) {
        if (density_.size() != space_.size()) throw ShapeError("density length does not match sample space");
        for (double p : density_) {
            if (!std::isfinite(p)) throw DomainError("density entries must be finite");
            if (p < 1e-300) throw DomainError("density entries must be strictly positive");
        }
    }

    const SampleSpace& space() const { return space_; }
    const Vec& density() const { return density_; }
    std::size_t size() const { return density_.size(); }

    double mass() const { return expectation(space_, density_); }
    bool is_probability(double tol = 1e-10) const { return std::abs(mass() - 1.0) <= tol; }

  private:
    SampleSpace space_;
    Vec density_;
};

// An element of the chart's model space: one real value per atom.
class ChartVector {
  public:
    ChartVector(SampleSpace space, Vec values) : space_(std::move(space)), values_(std::move(values)) {
        if (values_.size() != space_.size()) throw ShapeError("chart vector length does not match sample space");
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("chart vector entries must be finite");
    }

    const SampleSpace& space() const { return space_; }
    const Vec& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

  private:
    SampleSpace space_;
    Vec values_;
};

// Bundle-chart representation of a tangent vector: base point plus a
// direction of the same length.
class TangentRep {
  public:
    TangentRep(ChartVector base, Vec direction) : base_(std::move(base)), direction_(std::move(direction)) {
        if (direction_.size() != base_.size()) throw ShapeError("tangent direction length does not match base");
    }

    const ChartVector& base() const { return base_; }
    const Vec& direction() const { return direction_; }

  private:
    ChartVector base_;
    Vec direction_;
};

// Integrability order lambda >= 2. On a finite space every moment is
// finite, so lambda only labels which derivative orders are in class and
// which norm the diagnostics report; the default 4 licenses mixed third
// derivatives.
struct LambdaOrder {
    double lambda = 4.0;

    explicit LambdaOrder(double l = 4.0) : lambda(l) {
        if (!(l >= 2.0)) throw DomainError("lambda must be >= 2");
    }
};

inline ChartVector chart_forward(const FiniteMeasure& measure) {
    const Vec& p = measure.density();
    Vec a(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) a[i] = p[i] + std::log(p[i]);
    return ChartVector(measure.space(), std::move(a));
}

inline FiniteMeasure chart_inverse(const ChartVector& chart, const ToleranceConfig& cfg = {}) {
    const Vec& a = chart.values();
    Vec p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = psi(a[i], cfg);
    return FiniteMeasure(chart.space(), std::move(p));
}

// Amari's alpha-embedding: (2/(1-alpha)) p^((1-alpha)/2), or log p at
// alpha = 1. Computed from the density directly; identical to applying
// xi_alpha to the chart values.
inline Vec alpha_embed(const AlphaParam& alpha, const FiniteMeasure& measure) {
    const Vec& p = measure.density();
    Vec out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = xi_alpha_from_density(alpha, p[i], 0);
    return out;
}

struct MembershipReport {
    double density_moment; // E_mu p^lambda
    double log_moment;     // E_mu |log p|^lambda
    double mass;           // E_mu p
    double min_density;
};

inline MembershipReport membership_diagnostics(const FiniteMeasure& measure, const LambdaOrder& order = LambdaOrder()) {
    const Vec& p = measure.density();
    const Vec& w = measure.space().weights();
    MembershipReport rep{0.0, 0.0, 0.0, p.empty() ? 0.0 : p[0]};
    for (std::size_t i = 0; i < p.size(); ++i) {
        rep.density_moment += w[i] * std::pow(p[i], order.lambda);
        rep.log_moment += w[i] * std::pow(std::abs(std::log(p[i])), order.lambda);
        rep.mass += w[i] * p[i];
        rep.min_density = std::min(rep.min_density, p[i]);
    }
    return rep;
}

} // namespace igeo
