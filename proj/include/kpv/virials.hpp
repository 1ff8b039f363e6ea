#pragma once

#include <string>
#include <vector>

#include "kpv/invariants.hpp"
#include "kpv/schedules.hpp"
#include "kpv/spectral.hpp"
#include "kpv/weights.hpp"

namespace kpv {

// Window of a virial functional at one instant: scales, shifts, attenuation and their rates.
// rate_* are logarithmic derivatives (f'/f); drho* are plain derivatives.
struct WindowScales {
    double sx = 1, sy = 1;
    double sxq = 1;  // second x scale, used by I only
    double rho1 = 0, rho2 = 0;
    double eta = 1;
    double rate_sx = 0, rate_sy = 0, rate_sxq = 0;
    double drho1 = 0, drho2 = 0;
    double rate_eta = 0;
};

// K: (lambda_1, lambda_2, eta_1); J: (lambda_3, lambda_4, eta_2); I: (lambda_5, lambda_5^q, lambda_6, eta_3).
WindowScales k_scales(double t, const ScheduleParams& s);
WindowScales j_scales(double t, const ScheduleParams& s);
WindowScales i_scales(double t, const ScheduleParams& s);

struct FarScales {
    double theta = 1, rate_theta = 0;
};
FarScales far_scales(double t, const ScheduleParams& s);

// K = (1/eta) int u^2 psi(X) phi(Y), X = (x - rho1)/sx, Y = (y - rho2)/sy.
double K_functional(const Field& u, const WeightProfile& w, const WindowScales& k);
// J = (1/eta) int u v phi(X) psi(Y), v = d_x^{-1} u_y.
double J_functional(const Field& u, const WeightProfile& w, const WindowScales& k);
// I = (1/eta) int u psi(X) phi((x - rho1)/sxq) phi(Y).
double I_functional(const Field& u, const WeightProfile& w, const WindowScales& k);
// Lx = 1/2 int u^2 chi((x + theta)/theta), Ly with y. M uses the bump xi in place of chi.
double Lx_functional(const Field& u, const WeightProfile& w, const FarScales& f);
double Ly_functional(const Field& u, const WeightProfile& w, const FarScales& f);
double Mx_functional(const Field& u, const WeightProfile& w, const FarScales& f);
double My_functional(const Field& u, const WeightProfile& w, const FarScales& f);

// The three pieces of u_t used by the solver:
// -u_xxx, -kappa d_x^{-1} u_yy, and the (dealiased) -(u^2/2)_x.
struct Tendency {
    Field dispersion_x, dispersion_y, nonlinear;
    Field total() const { return dispersion_x + dispersion_y + nonlinear; }
};
// Throws NonZeroXMean.
Tendency tendency_parts(const Field& u, int kappa, bool dealias_on = true, bool nonlinear_on = true);

struct RateTerm {
    std::string name;
    double value = 0;
};
struct RateTerms {
    std::vector<RateTerm> terms;
    double sum() const;
    double abs_sum() const;
    double operator[](const std::string& name) const;  // throws std::out_of_range
};

// Time derivative of each functional split into the displayed terms, evaluated by direct
// quadrature of the pointwise integrands (no integration by parts), so every split is exact
// on the grid:
//   Lx: A11 + A12 (weight motion), A2 (-u u_xxx), A3 (-kappa u d_x^{-1}u_yy), A4 (nonlinear).
//   Ly: B11 + B12, B2, B3, B4. B2 vanishes identically; B4 up to dealiasing.
//   K:  K11, K12, K13 (the three parts of 2/eta int u u_t Phi), K2 (eta'), K31..K34 (window motion).
//   J:  J1 (eta'), J211, J212, J213 (u_t v), J22 (u v_t), J31..J34.
//   I:  I111, I112, I11n (the three parts of 1/eta int u_t W), I12..I17, I2 (eta').
RateTerms lx_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const FarScales& f);
RateTerms ly_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const FarScales& f);
RateTerms k_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const WindowScales& k);
RateTerms j_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const WindowScales& k);
RateTerms i_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const WindowScales& k);

// Integrated-by-parts forms of the dispersive and nonlinear terms, valid for fields that
// decay inside the box and weights resolved by the grid:
//   K11 = -3/(eta sx) int u_x^2 d_X Phi + 1/(eta sx^3) int u^2 d_X^3 Phi
//   K12 = -kappa/(eta sx) int v^2 d_X Phi + 2 kappa/(eta sy) int u v d_Y Phi
//   K13 = 2/(3 eta sx) int u^3 d_X Phi
//   A2  = -3/(2 theta) int u_x^2 chi' + 1/(2 theta^3) int u^2 chi'''
//   J211 = kappa/(2 eta sy) int v^2 d_Y Psi, taken at the K scales
//   I111 = (1/eta) int u d_x^3 W, I112 = kappa/eta int u_yy P (P the x-primitive of W from
//   -infinity, by quadrature), I11n = 1/(2 eta) int u^2 d_x W
// u must have zero x-mean for the I112 form.
RateTerms expanded_terms(const Field& u, int kappa, const WeightProfile& w, const WindowScales& kk,
                         const WindowScales& ii, const FarScales& f);

// 4th-order finite-difference derivative of uniformly spaced samples (one-sided stencils at
// the two first and last points). Throws InsufficientSamples below five samples.
std::vector<double> fd_derivative(const std::vector<double>& t, const std::vector<double>& f);

struct RateResidual {
    double max_abs = 0;  // max |FD - sum of terms|
    double scale = 0;    // max over samples of sum |terms|
    double relative = 0;
    std::size_t worst = 0;
};
// Compares the finite-difference derivative of the functional samples with the term sums.
RateResidual rate_check(const std::vector<double>& t, const std::vector<double>& values,
                        const std::vector<RateTerms>& terms);

// Half the squared L2 norm of u (or of v, u_x) over a region.
struct RegionMass {
    double value = 0;
    bool outside_box = false;
};
enum class RegionField { U, V, Ux };
RegionMass region_mass(const Field& u, Region which, double t, const ScheduleParams& s,
                       RegionField what = RegionField::U);

// Weighted integrals divided by t log t: |u|^3 and v^2 against phi phi at the J scales,
// u_x^2 against phi phi at the K scales.
struct DecayIntegrals {
    double cubic = 0, v2 = 0, ux2 = 0;
};
DecayIntegrals decay_integrals(const Field& u, double t, const ScheduleParams& s, const WeightProfile& w);

struct DiagnosticsRow {
    double t = 0;
    double K = 0, J = 0, I = 0, Lx = 0, Ly = 0, Mx = 0, My = 0;
    double mass_omega1 = 0, mass_omega2 = 0, mass_omega1tilde_v = 0, mass_omega2tilde_ux = 0;
    bool region_outside_box = false;
    ConservedRecord conserved;
};

DiagnosticsRow diagnostics(const Field& u, double t, int kappa, const ScheduleParams& s, const WeightProfile& w);

class DiagnosticsSeries {
public:
    // Throws std::invalid_argument unless t increases strictly and every value is finite.
    void push(const DiagnosticsRow& r);
    const std::vector<DiagnosticsRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<DiagnosticsRow> rows_;
};

}  // namespace kpv
