// Walks through the library on the smallest interesting example: the
// one-parameter exponential family on a two-point space. Prints the
// metric, the connection coefficients, and a short geodesic.

#include <cstdio>

#include "igeo/igeo.hpp"

int main() {
    using namespace igeo;

    const SampleSpace space(Vec{0.5, 0.5});
    DomainBox box;
    box.lo = Eigen::VectorXd::Constant(1, -4.0);
    box.hi = Eigen::VectorXd::Constant(1, 4.0);
    const ExponentialFamily family = expfam_build(space, {Vec{1.0, -1.0}}, box);

    std::printf("two-point exponential family, statistic eta = (+1, -1)\n\n");
    for (double y : {0.0, 0.5, 1.0}) {
        Eigen::VectorXd yv(1);
        yv << y;
        const ConnectionData conn = christoffel(family.family, yv, AlphaParam(0.0));
        std::printf("y = %4.1f   g = %.12f   Gamma_0 = %+.12f\n", y, conn.g(0, 0), conn.christoffel[0](0, 0));
    }

    Eigen::VectorXd y0(1), v0(1);
    y0 << 0.0;
    v0 << 1.0;
    const GeodesicTrace trace = geodesic(family.family, AlphaParam(0.0), y0, v0, 1.0, 0.01);
    std::printf("\nalpha = 0 geodesic from y = 0 with unit speed:\n");
    for (std::size_t i = 0; i < trace.t.size(); i += 25)
        std::printf("  t = %4.2f   y = %.8f   metric speed = %.12f\n", trace.t[i], trace.y[i][0],
                    trace.metric_speed[i]);

    const FiniteMeasure P(space, Vec{0.5, 1.5});
    const FiniteMeasure mu(space, Vec{1.0, 1.0});
    std::printf("\nalpha-divergences D_alpha(P | mu) for p = (0.5, 1.5):\n");
    for (double a : {-1.0, 0.0, 1.0})
        std::printf("  alpha = %+4.1f   %.12f\n", a, divergence(AlphaParam(a), P, mu));
    return 0;
}
