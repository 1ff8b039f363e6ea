#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "kpv/spectral.hpp"

namespace kpv {

struct KpModel {
    int kappa = -1;  // -1: KP-I, +1: KP-II
    double dt = 0.01;
    bool dealias_on = true;
    bool nonlinear_on = true;
    double cfl = 0.5;
    double blowup_factor = 1e3;

    void validate() const;
};

struct SimState {
    double t = 0;
    Field u;
};

// Imaginary part w of the linear symbol L = i*w, so that u_t = L u - (u^2/2)_x
// in Fourier variables. w = kx^3 - kappa*ky^2/kx, and w = 0 on the kx = 0 column.
std::vector<double> linear_symbol(const Grid& g, int kappa);
double linear_symbol_at(double kx, double ky, int kappa);

// -(u^2/2)_x, the nonlinear tendency, returned in spectral form.
Spectrum nonlinear_tendency(const Spectrum& uhat, bool dealias_on = true);
// (u^2/2)_x in physical space.
Field nonlinear_term(const Field& u, bool dealias_on = true);

// Full right-hand side u_t of the equation for the given state.
Field time_derivative(const Field& u, int kappa, bool dealias_on = true, bool nonlinear_on = true);

struct ProjectionReport {
    Field u;
    double removed_mass = 0;  // half the squared L2 norm of the removed x-mean part
};
// Initial data is made x-mean-free once, before time stepping.
ProjectionReport project_initial_data(const Field& u0);

class Solver {
  public:
    Solver(const Grid& g, const KpModel& m);

    const KpModel& model() const { return model_; }
    const Grid& grid() const { return grid_; }

    // Largest sup norm allowed before BlowUp is raised; set from the initial data.
    void set_ceiling_from(const Field& u0);
    double ceiling() const { return ceiling_; }

    // One integrating-factor RK4 step of length model().dt.
    void step(SimState& s) const;
    double suggest_dt(const SimState& s) const;

    using Observer = std::function<void(const SimState&)>;
    // Steps from s.t to t_end. Observers fire at the start, every `every` steps
    // and at the end. Times are t0 + n*dt.
    void run(SimState& s, double t_end, double output_every, const Observer& obs) const;

  private:
    void step_spectral(Spectrum& uhat) const;

    Grid grid_;
    KpModel model_;
    std::vector<cplx> e_full_, e_half_;
    double ceiling_ = std::numeric_limits<double>::infinity();
};

double suggest_dt(const Field& u, double cfl);

// Largest dt <= dt_max that divides output_every into whole steps.
double dt_for_cadence(double dt_max, double output_every);

}  // namespace kpv
