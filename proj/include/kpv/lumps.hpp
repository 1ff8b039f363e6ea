#pragma once

#include <functional>

#include "kpv/spectral.hpp"

namespace kpv {

struct LumpParams {
    double c = 1.0;
    double beta = 0.0;
    double x0 = 0.0, y0 = 0.0, t0 = 0.0;
};

// u(x, y, t)
using SpaceTimeFn = std::function<double(double, double, double)>;

// 24 (3 - x^2 + y^2) / (x^2 + y^2 + 3)^2
double lump_Q(double x, double y);
// c Q(sqrt(c) x, c y)
double lump_Qc(double x, double y, double c);
// Lump of speed c with transverse boost beta, shifted by (x0, y0, t0).
double moving_lump(double x, double y, double t, const LumpParams& p);

// 3c sech^2(sqrt(c) x / 2), the KdV soliton of u_t + u_xxx + u u_x = 0, constant in y.
double kdv_line_soliton(double x, double y, double c);

// Galilean boost. KP-I: u(x - b^2 t - b(y - 2bt), y - 2bt, t);
// KP-II: u(x + b^2 t + b(y - 2bt), y - 2bt, t).
SpaceTimeFn galilean_transform(SpaceTimeFn u, double beta, int kappa);
// c u(c^{1/2} x, c y, c^{3/2} t)
SpaceTimeFn scaling_transform(SpaceTimeFn u, double c);
// u(x - x0, y - y0, t - t0)
SpaceTimeFn shift_transform(SpaceTimeFn u, double x0, double y0, double t0);

Field sample_at(const Grid& g, const SpaceTimeFn& u, double t);

// Moving lump summed over all periodic images of an lx-by-ly box, x-images first.
// The x-sum has a closed form and makes every row exactly mean-free.
double periodic_lump(double x, double y, double t, const LumpParams& p, double lx, double ly);

// Fields on a grid, as used for initial data.
Field lump_field(const Grid& g, const LumpParams& p, double t = 0.0);
Field periodic_lump_field(const Grid& g, const LumpParams& p, double t = 0.0);

}  // namespace kpv
