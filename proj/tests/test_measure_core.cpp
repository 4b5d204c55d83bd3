#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "igeo/measure_core.hpp"
#include "igeo/random.hpp"
#include "oracles.hpp"

using namespace igeo;

TEST_CASE("sample space validation and identity", "[measure_core]") {
    const SampleSpace space(Vec{0.5, 0.5});
    REQUIRE(space.size() == 2);
    REQUIRE_THROWS_AS(SampleSpace(Vec{}), DomainError);
    REQUIRE_THROWS_AS(SampleSpace(Vec{0.5, -0.5}), DomainError);
    REQUIRE_THROWS_AS(SampleSpace(Vec{0.5, 0.4}), DomainError);

    const SampleSpace copy = space;
    REQUIRE(copy == space);
    const SampleSpace other(Vec{0.5, 0.5}); // equal weights, distinct identity
    REQUIRE(other != space);
}

TEST_CASE("expectation", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    REQUIRE(expectation(half, Vec{1.0, 1.0}) == 1.0);
    REQUIRE(expectation(half, Vec{1.0, -1.0}) == 0.0);
    const SampleSpace space(Vec{0.2, 0.3, 0.5});
    REQUIRE_THAT(expectation(space, Vec{1.0, 2.0, 3.0}), Catch::Matchers::WithinAbs(2.3, 1e-15));
    REQUIRE_THROWS_AS(expectation(space, Vec{1.0, 2.0}), ShapeError);
}

TEST_CASE("lp_norm", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    REQUIRE(lp_norm(half, Vec{0.0, 0.0}, 2.0) == 0.0);
    REQUIRE_THAT(lp_norm(half, Vec{1.0, -1.0}, 2.0), Catch::Matchers::WithinAbs(1.0, 1e-15));
    const SampleSpace space(Vec{0.2, 0.3, 0.5});
    REQUIRE_THAT(lp_norm(space, Vec{1.0, 2.0, 3.0}, 4.0),
                 Catch::Matchers::WithinAbs(2.5971847800293341, 1e-14));
    REQUIRE_THROWS_AS(lp_norm(space, Vec{1.0, 2.0, 3.0}, 0.5), DomainError);
}

TEST_CASE("finite measure validation", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    REQUIRE_THROWS_AS(FiniteMeasure(half, Vec{1.0, 0.0}), DomainError);
    REQUIRE_THROWS_AS(FiniteMeasure(half, Vec{1.0, 1e-301}), DomainError);
    REQUIRE_THROWS_AS(FiniteMeasure(half, Vec{1.0}), ShapeError);
    const FiniteMeasure P(half, Vec{0.5, 1.5});
    REQUIRE(P.is_probability());
    REQUIRE_THAT(P.mass(), Catch::Matchers::WithinAbs(1.0, 1e-15));
    const FiniteMeasure heavy(half, Vec{2.0, 2.0});
    REQUIRE_FALSE(heavy.is_probability());
}

TEST_CASE("chart vector and tangent rep validation", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    REQUIRE_THROWS_AS(ChartVector(half, Vec{1.0, std::nan("")}), DomainError);
    REQUIRE_THROWS_AS(ChartVector(half, Vec{1.0}), ShapeError);
    const ChartVector at(half, Vec{0.0, 1.0});
    REQUIRE_THROWS_AS(TangentRep(at, Vec{1.0}), ShapeError);
    REQUIRE_NOTHROW(TangentRep(at, Vec{1.0, -1.0}));
}

TEST_CASE("balanced chart forward", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    const ChartVector ones = chart_forward(FiniteMeasure(half, Vec{1.0, 1.0}));
    REQUIRE(ones.values()[0] == 1.0);
    REQUIRE(ones.values()[1] == 1.0);

    const ChartVector mixed = chart_forward(FiniteMeasure(half, Vec{0.5, 1.5}));
    REQUIRE_THAT(mixed.values()[0], Catch::Matchers::WithinAbs(-0.19314718055994531, 1e-15));
    REQUIRE_THAT(mixed.values()[1], Catch::Matchers::WithinAbs(1.9054651081081644, 1e-15));

    const double e = std::exp(1.0);
    const ChartVector ee = chart_forward(FiniteMeasure(half, Vec{e, e}));
    REQUIRE_THAT(ee.values()[0], Catch::Matchers::WithinAbs(e + 1.0, 1e-15));
}

TEST_CASE("balanced chart inverse", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    const FiniteMeasure unit = chart_inverse(ChartVector(half, Vec{1.0, 1.0}));
    REQUIRE(unit.density()[0] == 1.0);

    const FiniteMeasure back = chart_inverse(ChartVector(half, Vec{-0.19314718055994531, 1.9054651081081644}));
    REQUIRE_THAT(back.density()[0], Catch::Matchers::WithinAbs(0.5, 1e-14));
    REQUIRE_THAT(back.density()[1], Catch::Matchers::WithinAbs(1.5, 1e-14));

    const double z = 2.0 + std::log(2.0);
    const FiniteMeasure twos = chart_inverse(ChartVector(half, Vec{z, z}));
    REQUIRE_THAT(twos.density()[0], Catch::Matchers::WithinAbs(2.0, 1e-14));

    SECTION("round trips on random data") {
        Rng rng(11);
        const SampleSpace space = random_space(rng, 6);
        for (int s = 0; s < 100; ++s) {
            const Vec a = random_vector(rng, space.size(), -10.0, 10.0);
            const Vec rebuilt = chart_forward(chart_inverse(ChartVector(space, a))).values();
            for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(rebuilt[i] - a[i]) <= 1e-10);
        }
    }
}

TEST_CASE("alpha embeddings", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    const FiniteMeasure unit(half, Vec{1.0, 1.0});
    const Vec log_embed = alpha_embed(AlphaParam(1.0), unit);
    REQUIRE(log_embed[0] == 0.0);

    const FiniteMeasure P(half, Vec{0.5, 1.5});
    const Vec identity_embed = alpha_embed(AlphaParam(-1.0), P);
    REQUIRE(identity_embed[0] == 0.5);
    REQUIRE(identity_embed[1] == 1.5);

    const FiniteMeasure squares(half, Vec{0.25, 4.0});
    const Vec sqrt_embed = alpha_embed(AlphaParam(0.0), squares);
    REQUIRE(sqrt_embed[0] == 1.0);
    REQUIRE(sqrt_embed[1] == 4.0);

    SECTION("pairing identity across alpha") {
        Rng rng(23);
        const SampleSpace space = random_space(rng, 8);
        const Vec& w = space.weights();
        for (int s = 0; s < 50; ++s) {
            const FiniteMeasure A = random_finite_measure(rng, space);
            const FiniteMeasure B = random_finite_measure(rng, space);
            for (double al : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
                const AlphaParam alpha(al);
                const Vec fa = alpha_embed(alpha, A);
                const Vec fb = alpha_embed(alpha.dual(), B);
                double lhs = 0.0, rhs = 0.0;
                const double beta = 0.5 * (1.0 - al);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    lhs += w[i] * fa[i] * fb[i];
                    rhs += w[i] * std::pow(A.density()[i], beta) * std::pow(B.density()[i], 1.0 - beta);
                }
                rhs *= 4.0 / (1.0 - al * al);
                REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1.0));
            }
        }
    }
}

TEST_CASE("membership diagnostics", "[measure_core]") {
    const SampleSpace half(Vec{0.5, 0.5});
    const MembershipReport unit = membership_diagnostics(FiniteMeasure(half, Vec{1.0, 1.0}));
    REQUIRE(unit.density_moment == 1.0);
    REQUIRE(unit.log_moment == 0.0);
    REQUIRE(unit.mass == 1.0);
    REQUIRE(unit.min_density == 1.0);

    const MembershipReport mixed =
        membership_diagnostics(FiniteMeasure(half, Vec{0.5, 1.5}), LambdaOrder(2.0));
    REQUIRE_THAT(mixed.mass, Catch::Matchers::WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(mixed.density_moment, Catch::Matchers::WithinAbs(1.25, 1e-15));
    REQUIRE(mixed.min_density == 0.5);

    REQUIRE_THROWS_AS(LambdaOrder(1.5), DomainError);
}
