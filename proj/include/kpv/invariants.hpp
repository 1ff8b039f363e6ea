#pragma once

#include "kpv/spectral.hpp"

namespace kpv {

// M[u] = 1/2 int u^2
double mass(const Field& u);
// E[u] = int (1/2 u_x^2 - kappa/2 (d_x^{-1} u_y)^2 - 1/6 u^3). The cubic weight 1/6
// is the one conserved by u_t + u_xxx + kappa d_x^{-1} u_yy + u u_x = 0.
double energy(const Field& u, int kappa);
// P[u] = 1/2 int u d_x^{-1} u_y
double momentum(const Field& u);

struct SecondEnergy {
    double value = 0;
    // Share of |d_x^2 u|^2 carried by modes beyond half of Nyquist in either direction.
    double tail_fraction = 0;
    bool resolution_warning = false;
};
inline constexpr double kSecondEnergyTailLimit = 1e-6;

// F[u] = int (3/2 u_xx^2 - 5k u_y^2 + 5/6 w^2 + 5/6 k u^2 w + 5/6 k u v^2 + 5/4 u^2 u_xx + 5/24 u^4),
// with v = d_x^{-1} u_y, w = d_x^{-2} u_yy and k = kappa. For KP-I (k = -1) this is the
// classical second energy; the KP-II signs follow from the same conservation computation.
SecondEnergy second_energy(const Field& u, int kappa = -1);

// d_x^{-1} d_y u and d_x^{-2} d_y^2 u; each antiderivative re-projects kx = 0.
Field dxinv_dy(const Field& u);
Field dxinv2_dy2(const Field& u);

struct ConservedRecord {
    double t = 0;
    double mass = 0, energy = 0, momentum = 0, second_energy = 0;
    bool resolution_warning = false;
};
ConservedRecord conserved(const Field& u, int kappa, double t);

// ||u|| + ||u_x|| + ||d_x^{-1} u_y||
double e1_norm(const Field& u);
// ||u|| + ||d_x^{-1} u_y|| + ||u_xx|| + ||d_x^{-2} u_yy||
double e2_norm(const Field& u);
double dy_norm(const Field& u);

// ||u||_p / (||u||^{(6-p)/2p} ||u_x||^{(p-2)/p} ||d_x^{-1} u_y||^{(p-2)/2p}), 2 <= p <= 6.
// Throws DegenerateDenominator if a factor with nonzero exponent is below 1e-14.
double interpolation_ratio(const Field& u, double p);

}  // namespace kpv
