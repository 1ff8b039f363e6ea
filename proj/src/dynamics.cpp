#include "kpv/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "kpv/errors.hpp"

namespace kpv {

void KpModel::validate() const {
    if (kappa != -1 && kappa != 1) throw std::invalid_argument("kappa must be -1 or +1");
    if (!(dt != 0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and nonzero");
    if (!(cfl > 0)) throw std::invalid_argument("cfl must be positive");
    if (!(blowup_factor > 0)) throw std::invalid_argument("blowup_factor must be positive");
}

// u_t = -u_xxx - kappa*d_x^{-1} u_yy - ...  gives, per mode,
// (i kx)^3 -> -i kx^3 and d_x^{-1} d_y^2 -> -ky^2/(i kx) = i ky^2/kx.
double linear_symbol_at(double kx, double ky, int kappa) {
    if (kx == 0) return 0.0;
    return kx * kx * kx - kappa * ky * ky / kx;
}

std::vector<double> linear_symbol(const Grid& g, int kappa) {
    std::vector<double> w(g.spec_size());
    for (int jy = 0; jy < g.ny; ++jy)
        for (int jx = 0; jx < g.nkx(); ++jx) {
            // The Nyquist column cannot carry an odd x-derivative consistently.
            const bool nyq = jx == g.nx / 2;
            w[std::size_t(jy) * g.nkx() + jx] = nyq ? 0.0 : linear_symbol_at(g.kx(jx), g.ky(jy), kappa);
        }
    return w;
}

Spectrum nonlinear_tendency(const Spectrum& uhat, bool dealias_on) {
    Field u = from_spectral(uhat);
    for (double& x : u.v) x = 0.5 * x * x;
    Spectrum s = to_spectral(u);
    if (dealias_on) apply_dealias(s);
    apply_deriv_x(s, 1);
    for (auto& c : s.c) c = -c;
    return s;
}

Field nonlinear_term(const Field& u, bool dealias_on) {
    Spectrum s = nonlinear_tendency(to_spectral(u), dealias_on);
    for (auto& c : s.c) c = -c;
    return from_spectral(s);
}

Field time_derivative(const Field& u, int kappa, bool dealias_on, bool nonlinear_on) {
    Spectrum uh = to_spectral(u);
    const auto w = linear_symbol(u.grid, kappa);
    Spectrum out = nonlinear_on ? nonlinear_tendency(uh, dealias_on) : Spectrum(u.grid);
    for (std::size_t k = 0; k < out.c.size(); ++k) out.c[k] += cplx(0.0, w[k]) * uh.c[k];
    return from_spectral(out);
}

ProjectionReport project_initial_data(const Field& u0) {
    Spectrum s = to_spectral(u0);
    double col = 0;
    for (int jy = 0; jy < s.grid.ny; ++jy) col += std::norm(s(0, jy));
    apply_project_zero_xmean(s);
    ProjectionReport r;
    r.u = from_spectral(s);
    r.removed_mass = 0.5 * col * u0.grid.lx * u0.grid.ly;
    return r;
}

Solver::Solver(const Grid& g, const KpModel& m) : grid_(g), model_(m) {
    model_.validate();
    const auto w = linear_symbol(g, m.kappa);
    e_full_.resize(w.size());
    e_half_.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        e_full_[k] = std::polar(1.0, w[k] * m.dt);
        e_half_[k] = std::polar(1.0, 0.5 * w[k] * m.dt);
    }
}

void Solver::set_ceiling_from(const Field& u0) { ceiling_ = model_.blowup_factor * sup_norm(u0); }

double suggest_dt(const Field& u, double cfl) {
    return cfl * std::min(u.grid.dx(), u.grid.dy()) / std::max(1.0, sup_norm(u));
}

double dt_for_cadence(double dt_max, double output_every) {
    if (!(dt_max > 0) || !(output_every > 0)) throw std::invalid_argument("dt and output cadence must be positive");
    const double k = std::ceil(output_every / dt_max * (1 - 1e-12));
    return output_every / k;
}

double Solver::suggest_dt(const SimState& s) const { return kpv::suggest_dt(s.u, model_.cfl); }

// Lawson (integrating-factor) RK4 for u_t = L u + N(u) with exact exp(L dt).
void Solver::step_spectral(Spectrum& u) const {
    const double dt = model_.dt;
    const std::size_t n = u.c.size();
    auto N = [&](const Spectrum& v) {
        if (!model_.nonlinear_on) return Spectrum(grid_);
        return nonlinear_tendency(v, model_.dealias_on);
    };
    Spectrum k1 = N(u);
    Spectrum tmp(grid_);
    for (std::size_t k = 0; k < n; ++k) tmp.c[k] = e_half_[k] * (u.c[k] + 0.5 * dt * k1.c[k]);
    Spectrum k2 = N(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp.c[k] = e_half_[k] * u.c[k] + 0.5 * dt * k2.c[k];
    Spectrum k3 = N(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp.c[k] = e_full_[k] * u.c[k] + dt * e_half_[k] * k3.c[k];
    Spectrum k4 = N(tmp);
    for (std::size_t k = 0; k < n; ++k)
        u.c[k] = e_full_[k] * u.c[k] +
                 dt / 6.0 * (e_full_[k] * k1.c[k] + 2.0 * e_half_[k] * (k2.c[k] + k3.c[k]) + k4.c[k]);
    apply_project_zero_xmean(u);
}

void Solver::step(SimState& s) const {
    if (s.u.grid != grid_) throw std::invalid_argument("state grid differs from solver grid");
    Spectrum uh = to_spectral(s.u);
    step_spectral(uh);
    s.u = from_spectral(uh);
    s.t += model_.dt;
    const double sup = sup_norm(s.u);
    if (!std::isfinite(sup) || sup > ceiling_) throw BlowUp(s.t, sup, ceiling_);
}

void Solver::run(SimState& s, double t_end, double output_every, const Observer& obs) const {
    const double dt = model_.dt;
    const double t0 = s.t;
    const double nsteps_real = (t_end - t0) / dt;
    if (nsteps_real < -1e-9) throw std::invalid_argument("t_end lies behind the current time");
    const long nsteps = std::lround(nsteps_real);
    if (std::abs(nsteps_real - double(nsteps)) > 1e-6)
        throw std::invalid_argument("run span must be an integer number of steps");
    long every = std::max(1L, std::lround(output_every / std::abs(dt)));
    if (!(output_every > 0)) every = std::max(1L, nsteps);

    if (obs) obs(s);
    Spectrum uh = to_spectral(s.u);
    for (long n = 1; n <= nsteps; ++n) {
        step_spectral(uh);
        const bool emit = (n % every == 0) || n == nsteps;
        s.u = from_spectral(uh);
        s.t = t0 + double(n) * dt;
        const double sup = sup_norm(s.u);
        if (!std::isfinite(sup) || sup > ceiling_) throw BlowUp(s.t, sup, ceiling_);
        if (emit && obs) obs(s);
    }
}

}  // namespace kpv
