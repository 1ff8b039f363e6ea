#include <cmath>

#include "doctest.h"
#include "kpv/dynamics.hpp"
#include "kpv/errors.hpp"
#include "kpv/invariants.hpp"
#include "kpv/lumps.hpp"

using namespace kpv;

namespace {

// A cos(a x + b y) with a, b box harmonics.
Field plane_wave(const Grid& g, double A, int mx, int my, double& a, double& b) {
    a = 2 * M_PI * mx / g.lx;
    b = 2 * M_PI * my / g.ly;
    const double aa = a, bb = b;
    return Field::sample(g, [=](double x, double y) { return A * std::cos(aa * x + bb * y); });
}

// d_x^2 of an anisotropic Gaussian: every x-antiderivative up to order two stays localized.
Field gaussian_xx(const Grid& g, double amp, double sx, double sy, double shear = 0) {
    return Field::sample(g, [=](double x, double y) {
        const double X = x - shear * y;
        return amp * (X * X / (sx * sx) - 1) * std::exp(-0.5 * (X * X / (sx * sx) + y * y / (sy * sy)));
    });
}

}  // namespace

TEST_CASE("mass") {
    Grid g(32, 32, 10, 10);
    CHECK(mass(Field(g)) == 0.0);
    Field u = gaussian_xx(g, 1.0, 1.0, 1.5);
    CHECK(mass(u) == doctest::Approx(0.5 * l2_norm(u) * l2_norm(u)).epsilon(1e-14));
    CHECK(mass(u) > 0);
}

TEST_CASE("energy and momentum of a plane wave") {
    Grid g(32, 32, 8, 6);
    double a, b;
    const double A = 0.7;
    Field u = plane_wave(g, A, 2, 3, a, b);
    const double area = g.lx * g.ly;
    for (int kappa : {-1, 1}) {
        // cos^3 integrates to zero over whole periods.
        const double expect = 0.25 * A * A * area * (a * a - kappa * b * b / (a * a));
        CHECK(energy(u, kappa) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(momentum(u) == doctest::Approx(0.25 * A * A * area * b / a).epsilon(1e-12));
    CHECK(e1_norm(u) == doctest::Approx(A * std::sqrt(area / 2) * (1 + a + std::abs(b / a))).epsilon(1e-12));
    CHECK(dy_norm(u) == doctest::Approx(A * std::abs(b) * std::sqrt(area / 2)).epsilon(1e-12));
    const double e2 = A * std::sqrt(area / 2) * (1 + std::abs(b / a) + a * a + b * b / (a * a));
    CHECK(e2_norm(u) == doctest::Approx(e2).epsilon(1e-12));
}

TEST_CASE("energy kappa parity and zero data") {
    Grid g(64, 64, 20, 20);
    Field u = gaussian_xx(g, 1.0, 1.2, 1.5, 0.3);
    const Field v = dxinv_dy(u);
    CHECK(energy(u, -1) - energy(u, 1) == doctest::Approx(integral(v * v)).epsilon(1e-12));
    CHECK(energy(Field(g), 1) == 0.0);
    CHECK(momentum(Field(g)) == 0.0);
    CHECK(second_energy(Field(g)).value == 0.0);
    CHECK(e1_norm(Field(g)) == 0.0);
    CHECK(e2_norm(u) >= l2_norm(u));
}

TEST_CASE("momentum vanishes on y-even data") {
    Grid g(64, 64, 20, 20);
    Field u = project_zero_xmean(gaussian_xx(g, 1.0, 1.2, 1.5));
    CHECK(std::abs(momentum(u)) <= 1e-14 * mass(u));
}

TEST_CASE("nonzero x-mean is rejected") {
    Grid g(16, 16, 4, 4);
    Field u = Field::sample(g, [](double x, double y) { return std::exp(-x * x - y * y); });
    CHECK_THROWS_AS(energy(u, -1), NonZeroXMean);
    CHECK_THROWS_AS(momentum(u), NonZeroXMean);
    CHECK_THROWS_AS(second_energy(u), NonZeroXMean);
    CHECK_THROWS_AS(interpolation_ratio(u, 3), NonZeroXMean);
}

TEST_CASE("second energy quadratic limit") {
    Grid g(128, 128, 30, 30);
    Field w = dealias(gaussian_xx(g, 1.0, 1.3, 1.1, 0.2));
    for (int kappa : {-1, 1}) {
        const Field wxx = deriv_x(w, 2), wy = deriv_y(w, 1), ww = dxinv2_dy2(w);
        const double quad = integral(1.5 * (wxx * wxx) + (-5.0 * kappa) * (wy * wy) + (5.0 / 6.0) * (ww * ww));
        // F[eps w]/eps^2 = quad + O(eps); Richardson over eps and eps/2 removes the linear term.
        const double e = 1e-4;
        const double f1 = second_energy(w * e, kappa).value / (e * e);
        const double f2 = second_energy(w * (e / 2), kappa).value / (e * e / 4);
        CHECK((2 * f2 - f1) == doctest::Approx(quad).epsilon(1e-8));
    }
}

TEST_CASE("second energy flags unresolved data") {
    Grid g(128, 128, 40, 40);
    Field smooth = dealias(project_zero_xmean(gaussian_xx(g, 1.0, 2.0, 2.0)));
    CHECK_FALSE(second_energy(smooth).resolution_warning);
    Field sharp = project_zero_xmean(gaussian_xx(g, 1.0, 0.3, 0.3));
    const SecondEnergy f = second_energy(sharp);
    CHECK(f.resolution_warning);
    CHECK(f.tail_fraction > kSecondEnergyTailLimit);
}

TEST_CASE("conserved quantities along a short resolved run") {
    Grid g(128, 128, 40, 40);
    for (int kappa : {-1, 1}) {
        KpModel m;
        m.kappa = kappa;
        m.dt = 0.002;
        Solver s(g, m);
        SimState st{0, dealias(project_zero_xmean(gaussian_xx(g, 1.5, 1.5, 2.0, 0.3)))};
        const ConservedRecord a = conserved(st.u, kappa, st.t);
        for (int n = 0; n < 500; ++n) s.step(st);
        const ConservedRecord b = conserved(st.u, kappa, st.t);
        CHECK(std::abs(b.mass - a.mass) <= 1e-10 * a.mass);
        CHECK(std::abs(b.energy - a.energy) <= 1e-6 * std::abs(a.energy));
        CHECK(std::abs(b.momentum - a.momentum) <= 1e-6 * std::abs(a.momentum));
    }
}

TEST_CASE("interpolation ratio") {
    Grid g(128, 128, 40, 40);
    Field u = dealias(gaussian_xx(g, 1.0, 1.3, 1.7, 0.4));
    CHECK(interpolation_ratio(u, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(interpolation_ratio(Field(g), 3), DegenerateDenominator);
    CHECK_THROWS(interpolation_ratio(u, 7));

    // Shifting by whole cells permutes samples, so every norm is unchanged.
    Field sh(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) sh((i + 17) % g.nx, (j + 5) % g.ny) = u(i, j);
    for (double p : {3.0, 4.0, 6.0})
        CHECK(interpolation_ratio(sh, p) == doctest::Approx(interpolation_ratio(u, p)).epsilon(1e-12));

    // Scaling c u(c^{1/2} x, c y): the sample set on the rescaled box is c times the original.
    const double c = 2.0;
    Grid gs(128, 128, 40 / std::sqrt(c), 40 / c);
    Field us = u * c;
    us.grid = gs;
    for (double p : {2.0, 3.0, 4.0, 6.0})
        CHECK(interpolation_ratio(us, p) == doctest::Approx(interpolation_ratio(u, p)).epsilon(1e-12));
}
