#include <cmath>
#include <vector>

#include "doctest.h"
#include "kpv/dynamics.hpp"
#include "kpv/errors.hpp"
#include "kpv/invariants.hpp"
#include "kpv/virials.hpp"

using namespace kpv;

namespace {

const WeightProfile& profile() {
    static const WeightProfile w = build_weight_profile();
    return w;
}

// Second x-derivative of a Gaussian, so that u and d_x^{-1} u both decay inside the box.
Field bump(const Grid& g, double x0 = 0.7, double y0 = -0.4, double s = 3.0) {
    return Field::sample(g, [=](double x, double y) {
        const double X = x - x0, Y = y - y0;
        return 3 * (2 * X * X / (s * s) - 1) * std::exp(-(X * X + 0.6 * Y * Y) / (s * s));
    });
}

WindowScales moving(double t) {
    WindowScales k;
    k.sx = 4 * std::exp(0.1 * t);
    k.rate_sx = 0.1;
    k.sxq = std::pow(k.sx, 1.05);
    k.rate_sxq = 0.105;
    k.sy = 5 * std::exp(-0.05 * t);
    k.rate_sy = -0.05;
    k.rho1 = 0.3 * t - 0.5;
    k.drho1 = 0.3;
    k.rho2 = 0.4 - 0.2 * t;
    k.drho2 = -0.2;
    k.eta = std::exp(0.2 * t);
    k.rate_eta = 0.2;
    return k;
}

FarScales moving_far(double t) { return {6 * std::exp(0.1 * t), 0.1}; }

}  // namespace

TEST_CASE("tendency parts add up to the solver right-hand side") {
    const Grid g(64, 64, 40, 40);
    const Field u = bump(g);
    for (int kappa : {-1, 1}) {
        const Field total = tendency_parts(u, kappa).total();
        const Field ref = time_derivative(u, kappa);
        CHECK(sup_norm(total - ref) <= 1e-12 * sup_norm(ref));
    }
    const Field offset = u + Field(g, 0.1);
    CHECK_THROWS_AS(tendency_parts(offset, 1), NonZeroXMean);
    CHECK_THROWS_AS(J_functional(offset, profile(), WindowScales{}), NonZeroXMean);
}

TEST_CASE("parity zeros and crude bounds") {
    const Grid g(64, 64, 40, 40);
    const WeightProfile& w = profile();
    WindowScales k;
    k.sx = 3;
    k.sy = 4;
    k.sxq = std::pow(3.0, 1.05);
    k.rho2 = 0.8;
    k.eta = 2;
    const Field ev = bump(g, 0.0, 1.0);
    CHECK(std::abs(K_functional(ev, w, k)) <= 1e-12);
    CHECK(std::abs(J_functional(ev, w, k)) <= 1e-12);

    const Field u = bump(g);
    const double m = mass(u);
    CHECK(std::abs(K_functional(u, w, k)) <= 1.5375 * 2 * m / k.eta);
    CHECK(std::abs(J_functional(u, w, k)) <= 1.5375 * 2 * std::sqrt(m * mass(dxinv_dy(u))) / k.eta);
    const FarScales f{8, 0};
    CHECK(Lx_functional(u, w, f) >= 0);
    CHECK(Lx_functional(u, w, f) <= m);
    CHECK(Mx_functional(u, w, f) <= m);
}

TEST_CASE("integrated-by-parts forms agree with the raw rate terms") {
    // The weights switch on over a short stretch, so their derivatives need a fine grid.
    const Grid g(512, 512, 48, 48);
    const WeightProfile& w = profile();
    const Field u = bump(g, 0.3, 0.2, 2.5);
    WindowScales kk;
    kk.sx = 6;
    kk.sy = 6;
    kk.rho1 = 0.4;
    kk.rho2 = -0.3;
    kk.eta = 2;
    WindowScales ii = kk;
    ii.sx = 5;
    ii.sxq = std::pow(5.0, 1.05);
    ii.sy = 6;
    const FarScales f{4, 0.1};
    for (int kappa : {-1, 1}) {
        const Tendency ut = tendency_parts(u, kappa);
        const RateTerms e = expanded_terms(u, kappa, w, kk, ii, f);
        const RateTerms K = k_rate_terms(u, ut, w, kk);
        const RateTerms J = j_rate_terms(u, ut, w, kk);
        const RateTerms I = i_rate_terms(u, ut, w, ii);
        const RateTerms A = lx_rate_terms(u, ut, w, f);
        const double tol = 1e-5;
        CHECK(e["K11"] == doctest::Approx(K["K11"]).epsilon(tol));
        CHECK(e["K12"] == doctest::Approx(K["K12"]).epsilon(tol));
        CHECK(e["K13"] == doctest::Approx(K["K13"]).epsilon(1e-3));
        CHECK(e["A2"] == doctest::Approx(A["A2"]).epsilon(tol));
        CHECK(e["J211"] == doctest::Approx(J["J211"]).epsilon(tol));
        CHECK(e["I111"] == doctest::Approx(I["I111"]).epsilon(1e-4));
        CHECK(e["I112"] == doctest::Approx(I["I112"]).epsilon(5e-4));
        CHECK(e["I11n"] == doctest::Approx(I["I11n"]).epsilon(1e-3));
    }
}

TEST_CASE("far-field rate terms: weight motion is non-positive and B2 vanishes") {
    const Grid g(64, 64, 40, 40);
    const WeightProfile& w = profile();
    const Field u = bump(g, -5, 4, 3);
    const FarScales f{6, 0.3};
    const Tendency ut = tendency_parts(u, 1);
    const RateTerms A = lx_rate_terms(u, ut, w, f);
    const RateTerms B = ly_rate_terms(u, ut, w, f);
    CHECK(A["A11"] + A["A12"] <= 0);
    CHECK(B["B11"] + B["B12"] <= 0);
    CHECK(std::abs(B["B2"]) <= 1e-12 * B.abs_sum());
    CHECK(std::abs(B["B4"]) <= 1e-3 * B.abs_sum());
    CHECK_THROWS_AS(A["nope"], std::out_of_range);
}

TEST_CASE("rate terms reproduce the time derivative along a run") {
    const Grid g(64, 64, 40, 40);
    const WeightProfile& w = profile();
    for (int kappa : {-1, 1}) {
        KpModel m;
        m.kappa = kappa;
        m.dt = 0.004;
        Solver solver(g, m);
        SimState st{0.0, project_initial_data(bump(g)).u};
        std::vector<double> ts;
        std::vector<std::vector<double>> vals(5);
        std::vector<std::vector<RateTerms>> terms(5);
        solver.run(st, 0.2, m.dt, [&](const SimState& s) {
            const Tendency ut = tendency_parts(s.u, kappa);
            const WindowScales k = moving(s.t);
            const FarScales f = moving_far(s.t);
            ts.push_back(s.t);
            vals[0].push_back(K_functional(s.u, w, k));
            vals[1].push_back(J_functional(s.u, w, k));
            vals[2].push_back(I_functional(s.u, w, k));
            vals[3].push_back(Lx_functional(s.u, w, f));
            vals[4].push_back(Ly_functional(s.u, w, f));
            terms[0].push_back(k_rate_terms(s.u, ut, w, k));
            terms[1].push_back(j_rate_terms(s.u, ut, w, k));
            terms[2].push_back(i_rate_terms(s.u, ut, w, k));
            terms[3].push_back(lx_rate_terms(s.u, ut, w, f));
            terms[4].push_back(ly_rate_terms(s.u, ut, w, f));
        });
        REQUIRE(ts.size() == 51);
        for (int n = 0; n < 5; ++n) {
            const RateResidual r = rate_check(ts, vals[n], terms[n]);
            INFO("kappa=" << kappa << " functional " << n << " worst sample " << r.worst);
            CHECK(r.relative <= 1e-4);
        }
    }
}

TEST_CASE("finite-difference derivative") {
    std::vector<double> t, f;
    for (int i = 0; i < 9; ++i) {
        t.push_back(1 + 0.1 * i);
        f.push_back(std::pow(t.back(), 4));
    }
    const auto d = fd_derivative(t, f);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(d[i] == doctest::Approx(4 * std::pow(t[i], 3)).epsilon(1e-12));
    CHECK_THROWS_AS(fd_derivative({0, 1, 2, 3}, {0, 1, 2, 3}), InsufficientSamples);
    CHECK_THROWS_AS(rate_check({0, 1, 2, 3}, {0, 1, 2, 3}, std::vector<RateTerms>(4)), InsufficientSamples);
    CHECK_THROWS_AS(fd_derivative({0, 1, 2, 3, 5}, {0, 1, 2, 3, 4}), std::invalid_argument);
}

TEST_CASE("region masses are nested and bounded by the mass") {
    const Grid g(128, 128, 200, 200);
    const ScheduleParams s;
    const Field u = bump(g, 1, -1, 4);
    const double m = mass(u);
    for (double t : {20.0, 100.0}) {
        const double r1 = region_mass(u, Region::Omega1, t, s).value;
        const double r1t = region_mass(u, Region::Omega1Tilde, t, s).value;
        const double r2t = region_mass(u, Region::Omega2Tilde, t, s).value;
        CHECK(r2t <= r1t);
        CHECK(r1t <= r1);
        CHECK(r1 <= m * (1 + 1e-12));
        CHECK(region_mass(u, Region::Omega2, t, s).value <= m);
    }
}

TEST_CASE("diagnostic rows and series validation") {
    const Grid g(64, 64, 60, 60);
    const ScheduleParams s;
    const WeightProfile& w = profile();
    const Field u = bump(g);
    DiagnosticsSeries series;
    const DiagnosticsRow a = diagnostics(u, 10, -1, s, w);
    CHECK(a.conserved.mass == doctest::Approx(mass(u)));
    CHECK(a.Lx >= 0);
    series.push(a);
    CHECK_THROWS_AS(series.push(a), std::invalid_argument);
    DiagnosticsRow b = diagnostics(u, 11, -1, s, w);
    b.K = NAN;
    CHECK_THROWS_AS(series.push(b), std::invalid_argument);
    b.K = 0;
    series.push(b);
    CHECK(series.size() == 2);

    const DecayIntegrals d = decay_integrals(u, 10, s, w);
    CHECK(d.cubic >= 0);
    CHECK(d.v2 >= 0);
    CHECK(d.ux2 >= 0);
}
