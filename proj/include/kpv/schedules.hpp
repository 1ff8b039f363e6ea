#pragma once

#include <cmath>
#include <string>

#include "kpv/spectral.hpp"

namespace kpv {

struct ScheduleParams {
    double b = 0.3, r = 2.0, q = 1.05, p = 0.7;
    double m1 = 0, m2 = 0;
    double l1 = 0, l2 = 0;
    double eps = 0.1;
    double eta0 = 0.05;
    double t_start = std::exp(2.0);

    // Throws ValidationError with one of the constraint ids
    // window_exponents, smoothing_exponent, time_exponent, shift_exponents,
    // log_exponent, region_margin, start_time.
    void validate() const;
};

// Scalings lambda_j = t^b / log^{n_j} t with n = 5, 4, 2, 3, 1 for j = 1..5, and lambda_6 = lambda_5^r.
double lambda(int j, double t, const ScheduleParams& s);
// eta_1 = t^{1-b} log^6 t, eta_2 = t^{1-b} log^4 t, eta_3 = t^{1-b} log t.
double eta(int k, double t, const ScheduleParams& s);
// rho_i = l_i t^{m_i}
double rho(int i, double t, const ScheduleParams& s);
// theta = t^{1-b} log^{1+eps} t
double theta(double t, const ScheduleParams& s);

// Logarithmic derivatives f'/f, and rho' itself (rho may vanish).
double lambda_rate(int j, double t, const ScheduleParams& s);
double eta_rate(int k, double t, const ScheduleParams& s);
double rho_rate(int i, double t, const ScheduleParams& s);
double theta_rate(double t, const ScheduleParams& s);

enum class Region { Omega1, Omega2, Omega1Tilde, Omega2Tilde };
const char* region_name(Region r);

struct RegionMask {
    Field mask;  // 1 inside, 0 outside
    bool outside_box = false;  // the continuum region reaches past the periodic box
};

// Omega1: |x - rho_1| <= t^b, |y - rho_2| <= t^{br}.
// Omega1Tilde, Omega2Tilde: Omega1 with half-widths t^{b(1-eta0)}, t^{b(1-2 eta0)}
// and t^{b(1-4 eta0)}, t^{b(1-3 eta0)}.
// Omega2: |x| or |y| in [theta/2, 2 theta].
RegionMask region_mask(Region which, double t, const ScheduleParams& s, const Grid& g);

// Band factor used for Omega2.
inline constexpr double kFarBandFactor = 2.0;

}  // namespace kpv
