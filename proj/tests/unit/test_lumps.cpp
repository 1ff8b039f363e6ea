#include <cmath>
#include <random>
#include <tuple>

#include "doctest.h"
#include "kpv/lumps.hpp"

using namespace kpv;

TEST_CASE("lump profile values") {
    CHECK(lump_Q(0, 0) == 8.0);
    CHECK(std::abs(lump_Q(std::sqrt(3.0), 0)) <= 1e-15);
    CHECK(lump_Q(1.3, -0.4) == lump_Q(-1.3, 0.4));
    CHECK(lump_Q(1.3, 0.4) == lump_Q(1.3, -0.4));
    CHECK(lump_Qc(0.3, 0.2, 1.0) == lump_Q(0.3, 0.2));
    CHECK(lump_Qc(0, 0, 2.5) == doctest::Approx(20.0));
    CHECK(lump_Qc(0, 0, 4.0) == 32.0);
    CHECK_THROWS(lump_Qc(0, 0, 0.0));
}

TEST_CASE("lump rows have zero mean") {
    // Q = d/dx [24x/(x^2+y^2+3)], so the integral over [-X, X] is 48X/(X^2+y^2+3)
    // and the two tails cancel it exactly.
    const double X = 400;
    const int n = 400000;
    for (double y : {0.0, 0.5, 2.0, 7.0}) {
        const double h = 2 * X / n;
        double s = lump_Q(-X, y) + lump_Q(X, y);
        for (int k = 1; k < n; ++k) s += (k % 2 ? 4 : 2) * lump_Q(-X + k * h, y);
        s *= h / 3;
        const double tails = -48 * X / (X * X + y * y + 3);
        CHECK(std::abs(s + tails) <= 1e-6);
    }
}

TEST_CASE("lump decays like the inverse squared radius") {
    double m = 0;
    for (double r = 1; r < 1e4; r *= 1.7)
        for (double a = 0; a < 2 * M_PI; a += 0.3) {
            const double x = r * std::cos(a), y = r * std::sin(a);
            m = std::max(m, std::abs(lump_Q(x, y)) * (x * x + y * y + 3));
        }
    CHECK(m <= 24.0 + 1e-12);
}

TEST_CASE("moving lump special cases") {
    LumpParams p;
    p.c = 2;
    for (double x : {-1.0, 0.3, 2.2})
        for (double y : {-0.7, 0.0, 1.1}) {
            CHECK(moving_lump(x, y, 1.0, p) == doctest::Approx(lump_Qc(x - 2, y, 2)));
            LumpParams q;
            q.c = 1.5;
            q.beta = 1;
            CHECK(moving_lump(x, y, 0.0, q) == doctest::Approx(lump_Qc(x - y, y, 1.5)));
            LumpParams s;
            s.c = 1.2;
            s.x0 = 0.4;
            s.y0 = -0.3;
            CHECK(moving_lump(x, y, 0.0, s) == doctest::Approx(lump_Qc(x - 0.4, y + 0.3, 1.2)));
        }
}

TEST_CASE("moving lump is the Galilean boost of the resting lump") {
    const double c = 1.3, beta = 0.8;
    SpaceTimeFn rest = [c](double x, double y, double t) { return lump_Qc(x - c * t, y, c); };
    SpaceTimeFn boosted = galilean_transform(rest, beta, -1);
    LumpParams p;
    p.c = c;
    p.beta = beta;
    for (double t : {0.0, 0.7, 2.0})
        for (double x : {-1.0, 0.5})
            for (double y : {-0.3, 1.4}) CHECK(boosted(x, y, t) == doctest::Approx(moving_lump(x, y, t, p)));
}

TEST_CASE("transforms") {
    SpaceTimeFn u = [](double x, double y, double t) { return std::exp(-x * x - 0.5 * y * y) * std::cos(x + t) + 0.1 * y; };
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int k = 0; k < 20; ++k) {
        const double x = U(rng), y = U(rng), t = U(rng);
        CHECK(galilean_transform(u, 0.0, -1)(x, y, t) == u(x, y, t));
        CHECK(galilean_transform(u, 2.0, -1)(x, y, 0.0) == doctest::Approx(u(x - 2 * y, y, 0.0)));
        // The KP-II boost shears the other way.
        CHECK(galilean_transform(u, 2.0, 1)(x, y, 0.0) == doctest::Approx(u(x + 2 * y, y, 0.0)));
        for (int kappa : {-1, 1}) {
            auto back = galilean_transform(galilean_transform(u, 0.7, kappa), -0.7, kappa);
            CHECK(back(x, y, t) == doctest::Approx(u(x, y, t)).epsilon(1e-12));
        }
        CHECK(scaling_transform(u, 1.0)(x, y, t) == u(x, y, t));
        auto s12 = scaling_transform(scaling_transform(u, 1.7), 0.6);
        auto s = scaling_transform(u, 1.7 * 0.6);
        CHECK(std::abs(s12(x, y, t) - s(x, y, t)) <= 1e-12);
        auto a = shift_transform(shift_transform(u, 0.3, -0.2, 0.1), -1.0, 0.5, 0.4);
        auto b = shift_transform(shift_transform(u, -1.0, 0.5, 0.4), 0.3, -0.2, 0.1);
        CHECK(std::abs(a(x, y, t) - b(x, y, t)) <= 1e-14);
    }
}

TEST_CASE("line soliton solves the travelling KdV relation") {
    Grid g(1024, 8, 120, 4);
    for (double c : {0.5, 1.0, 2.0}) {
        Field f = Field::sample(g, [c](double x, double y) { return kdv_line_soliton(x, y, c); });
        CHECK(kdv_line_soliton(0, 3, c) == doctest::Approx(3 * c));
        CHECK(sup_norm(deriv_y(f, 1)) <= 1e-13);
        Field fxx = deriv_x(f, 2);
        double r = 0;
        for (std::size_t k = 0; k < f.v.size(); ++k)
            r = std::max(r, std::abs(-c * f.v[k] + fxx.v[k] + 0.5 * f.v[k] * f.v[k]));
        CHECK(r <= 1e-8);
    }
}

TEST_CASE("periodic lump matches a brute-force image sum") {
    const double lx = 40, ly = 30;
    LumpParams p;
    p.c = 1.3;
    p.beta = 0.4;
    p.x0 = 2;
    for (auto [x, y, t] : {std::tuple{0.0, 0.0, 0.0}, {3.0, -4.0, 0.5}, {-19.0, 14.0, 1.0}}) {
        // x-images first, truncated at |m| <= M. The remainder of each row is replaced by
        // the integral of the tail, using Q = d/dX [24X/(X^2+Y^2+3)].
        auto G = [](double X, double Y) { return 24 * X / (X * X + Y * Y + 3); };
        const double sc = std::sqrt(p.c);
        double direct = 0;
        const int M = 2000;
        for (int n = -40; n <= 40; ++n) {
            const double yn = y + n * ly;
            for (int m = -M; m <= M; ++m) direct += moving_lump(x + m * lx, yn, t, p);
            const double eta = yn - p.y0 - 2 * p.beta * t;
            const double xi = x - p.x0 - (p.c + p.beta * p.beta) * t - p.beta * eta;
            const double A = xi + (M + 0.5) * lx, B = xi - (M + 0.5) * lx;
            direct += sc / lx * (G(sc * B, p.c * eta) - G(sc * A, p.c * eta));
        }
        CHECK(periodic_lump(x, y, t, p, lx, ly) == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
    }
    // Translating by a period changes nothing.
    CHECK(periodic_lump(1.1, 2.2, 0.3, p, lx, ly) == doctest::Approx(periodic_lump(1.1 + lx, 2.2 - ly, 0.3, p, lx, ly)));
}

TEST_CASE("periodic lump is x-mean-free and close to the lump on a large box") {
    Grid g(256, 256, 64, 64);
    LumpParams p;
    Field f = periodic_lump_field(g, p);
    CHECK(xmean_fraction(to_spectral(f)) <= 1e-13);
    Grid big(256, 256, 400, 400);
    LumpParams q;
    q.c = 2;
    CHECK(std::abs(periodic_lump(0, 0, 0, q, 400, 400) - 16) <= 1e-3);
}
