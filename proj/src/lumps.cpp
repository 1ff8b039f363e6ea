#include "kpv/lumps.hpp"

#include <cmath>
#include <stdexcept>

namespace kpv {

double lump_Q(double x, double y) {
    const double r2 = x * x + y * y + 3.0;
    return 24.0 * (3.0 - x * x + y * y) / (r2 * r2);
}

double lump_Qc(double x, double y, double c) {
    if (!(c > 0)) throw std::invalid_argument("lump speed must be positive");
    return c * lump_Q(std::sqrt(c) * x, c * y);
}

double moving_lump(double x, double y, double t, const LumpParams& p) {
    const double b = p.beta;
    const double xs = x - p.x0, ys = y - p.y0, ts = t - p.t0;
    const double yy = ys - 2.0 * b * ts;
    return lump_Qc(xs - p.c * ts - b * b * ts - b * yy, yy, p.c);
}

// sum_m Q(X + mP, Y) = 12 d_X^2 log(cosh(kS) - cos(kX)), k = 2pi/P, S^2 = Y^2 + 3,
// written with half-angle forms to avoid cancellation for small k.
static double lump_row_images(double X, double Y, double P) {
    const double k = 2.0 * M_PI / P;
    const double kS = k * std::sqrt(Y * Y + 3.0);
    if (kS > 700) return 0.0;
    const double sh = std::sinh(0.5 * kS), sn = std::sin(0.5 * k * X);
    const double a = 2 * sh * sh, b = 2 * sn * sn;
    const double d = a + b;
    return 12 * k * k * (a * std::cos(k * X) - b) / (d * d);
}

double periodic_lump(double x, double y, double t, const LumpParams& p, double lx, double ly) {
    if (!(p.c > 0)) throw std::invalid_argument("lump speed must be positive");
    const double b = p.beta, c = p.c, sc = std::sqrt(c);
    const double xs = x - p.x0, ys = y - p.y0, ts = t - p.t0;
    const double yy = ys - 2.0 * b * ts;
    const double xi = xs - c * ts - b * b * ts - b * yy;
    const double P = sc * lx;
    // Row sums decay like exp(-2pi c |Y| / P); stop once below double precision.
    const int nmax = int(std::ceil(40.0 * P / (2 * M_PI * c * ly))) + 1;
    double s = 0;
    for (int n = -nmax; n <= nmax; ++n) {
        const double eta = yy + n * ly;
        s += lump_row_images(sc * (xi - b * n * ly), c * eta, P);
    }
    return c * s;
}

double kdv_line_soliton(double x, double, double c) {
    if (!(c > 0)) throw std::invalid_argument("soliton speed must be positive");
    const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * x);
    return 3.0 * c * s * s;
}

SpaceTimeFn galilean_transform(SpaceTimeFn u, double beta, int kappa) {
    if (kappa != -1 && kappa != 1) throw std::invalid_argument("kappa must be -1 or +1");
    return [u = std::move(u), beta, kappa](double x, double y, double t) {
        const double yy = y - 2.0 * beta * t;
        const double shift = beta * beta * t + beta * yy;
        return u(kappa == -1 ? x - shift : x + shift, yy, t);
    };
}

SpaceTimeFn scaling_transform(SpaceTimeFn u, double c) {
    if (!(c > 0)) throw std::invalid_argument("scaling factor must be positive");
    const double sc = std::sqrt(c);
    return [u = std::move(u), c, sc](double x, double y, double t) {
        return c * u(sc * x, c * y, c * sc * t);
    };
}

SpaceTimeFn shift_transform(SpaceTimeFn u, double x0, double y0, double t0) {
    return [u = std::move(u), x0, y0, t0](double x, double y, double t) {
        return u(x - x0, y - y0, t - t0);
    };
}

Field sample_at(const Grid& g, const SpaceTimeFn& u, double t) {
    return Field::sample(g, [&](double x, double y) { return u(x, y, t); });
}

Field lump_field(const Grid& g, const LumpParams& p, double t) {
    return Field::sample(g, [&](double x, double y) { return moving_lump(x, y, t, p); });
}

Field periodic_lump_field(const Grid& g, const LumpParams& p, double t) {
    return Field::sample(g, [&](double x, double y) { return periodic_lump(x, y, t, p, g.lx, g.ly); });
}

}  // namespace kpv
