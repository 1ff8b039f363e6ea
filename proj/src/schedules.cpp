#include "kpv/schedules.hpp"

#include <sstream>
#include <stdexcept>

#include "kpv/errors.hpp"

namespace kpv {

namespace {

void require(bool ok, const char* id, const std::string& msg) {
    if (!ok) throw ValidationError(id, msg);
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void check_time(double t, const ScheduleParams& s) {
    if (!(t >= s.t_start)) throw std::domain_error("t=" + num(t) + " precedes t_start=" + num(s.t_start));
}

double ipow(double x, int n) {
    double r = 1;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

constexpr int kLambdaLogPower[6] = {5, 4, 2, 3, 1, 0};
constexpr int kEtaLogPower[3] = {6, 4, 1};

void check_index(int i, int n, const char* what) {
    if (i < 1 || i > n) throw std::invalid_argument(std::string(what) + " index out of range");
}

}  // namespace

void ScheduleParams::validate() const {
    require(r > 5.0 / 3 && r < 3, "window_exponents", "r=" + num(r) + " must lie in (5/3, 3)");
    require(b > 0 && b < 2 / (3 + r), "window_exponents", "b=" + num(b) + " must lie in (0, 2/(3+r)) = (0, " + num(2 / (3 + r)) + ")");
    require(q > 1 && q < 2, "smoothing_exponent", "q=" + num(q) + " must lie in (1, 2)");
    require(b <= 2 / (2 + q + r), "smoothing_exponent", "b=" + num(b) + " must not exceed 2/(2+q+r) = " + num(2 / (2 + q + r)));
    require(std::abs(p + b - 1) <= 1e-12, "time_exponent", "p + b must equal 1 (p=" + num(p) + ", b=" + num(b) + ")");
    const double m1max = 1 - 0.5 * b * (r + 1), m2max = 1 - 0.5 * b * (q + 2 - r);
    require(m1 >= 0 && m1 < m1max, "shift_exponents", "m1=" + num(m1) + " must lie in [0, " + num(m1max) + ")");
    require(m2 >= 0 && m2 < m2max, "shift_exponents", "m2=" + num(m2) + " must lie in [0, " + num(m2max) + ")");
    require(eps > 0, "log_exponent", "eps must be positive");
    require(eta0 > 0 && eta0 < 0.25, "region_margin", "eta0=" + num(eta0) + " must lie in (0, 1/4)");
    require(t_start >= std::exp(2.0), "start_time", "t_start=" + num(t_start) + " must be at least e^2");
}

// t^{1-b} is formed as t / t^b so that products such as lambda_5 eta_3 = t hold to rounding.
double lambda(int j, double t, const ScheduleParams& s) {
    check_index(j, 6, "lambda");
    check_time(t, s);
    if (j == 6) return std::pow(lambda(5, t, s), s.r);
    return std::pow(t, s.b) / ipow(std::log(t), kLambdaLogPower[j - 1]);
}

double eta(int k, double t, const ScheduleParams& s) {
    check_index(k, 3, "eta");
    check_time(t, s);
    return t / std::pow(t, s.b) * ipow(std::log(t), kEtaLogPower[k - 1]);
}

double rho(int i, double t, const ScheduleParams& s) {
    check_index(i, 2, "rho");
    check_time(t, s);
    return i == 1 ? s.l1 * std::pow(t, s.m1) : s.l2 * std::pow(t, s.m2);
}

double theta(double t, const ScheduleParams& s) {
    check_time(t, s);
    return t / std::pow(t, s.b) * std::pow(std::log(t), 1 + s.eps);
}

double lambda_rate(int j, double t, const ScheduleParams& s) {
    check_index(j, 6, "lambda");
    check_time(t, s);
    if (j == 6) return s.r * lambda_rate(5, t, s);
    return s.b / t - kLambdaLogPower[j - 1] / (t * std::log(t));
}

double eta_rate(int k, double t, const ScheduleParams& s) {
    check_index(k, 3, "eta");
    check_time(t, s);
    return (1 - s.b) / t + kEtaLogPower[k - 1] / (t * std::log(t));
}

double rho_rate(int i, double t, const ScheduleParams& s) {
    check_index(i, 2, "rho");
    check_time(t, s);
    const double l = i == 1 ? s.l1 : s.l2, m = i == 1 ? s.m1 : s.m2;
    return m == 0 ? 0.0 : l * m * std::pow(t, m - 1);
}

double theta_rate(double t, const ScheduleParams& s) {
    check_time(t, s);
    return (1 - s.b) / t + (1 + s.eps) / (t * std::log(t));
}

const char* region_name(Region r) {
    switch (r) {
        case Region::Omega1: return "omega1";
        case Region::Omega2: return "omega2";
        case Region::Omega1Tilde: return "omega1tilde";
        case Region::Omega2Tilde: return "omega2tilde";
    }
    return "?";
}

RegionMask region_mask(Region which, double t, const ScheduleParams& s, const Grid& g) {
    check_time(t, s);
    RegionMask out{Field(g), false};
    const double hx = 0.5 * g.lx, hy = 0.5 * g.ly;

    if (which == Region::Omega2) {
        const double th = theta(t, s), lo = th / kFarBandFactor, hi = th * kFarBandFactor;
        out.outside_box = hi > hx || hi > hy;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double ax = std::abs(g.x(i)), ay = std::abs(g.y(j));
                out.mask(i, j) = ((ax >= lo && ax <= hi) || (ay >= lo && ay <= hi)) ? 1.0 : 0.0;
            }
        return out;
    }

    const double cx = rho(1, t, s), cy = rho(2, t, s);
    const double wx1 = std::pow(t, s.b), wy1 = std::pow(t, s.b * s.r);
    double wx = wx1, wy = wy1;
    if (which == Region::Omega1Tilde) {
        wx = std::pow(t, s.b * (1 - s.eta0));
        wy = std::pow(t, s.b * (1 - 2 * s.eta0));
    } else if (which == Region::Omega2Tilde) {
        wx = std::pow(t, s.b * (1 - 4 * s.eta0));
        wy = std::pow(t, s.b * (1 - 3 * s.eta0));
    }
    // The tilde regions are intersected with Omega1.
    wx = std::min(wx, wx1);
    wy = std::min(wy, wy1);
    out.outside_box = std::abs(cx) + wx > hx || std::abs(cy) + wy > hy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.mask(i, j) = (std::abs(g.x(i) - cx) <= wx && std::abs(g.y(j) - cy) <= wy) ? 1.0 : 0.0;
    return out;
}

}  // namespace kpv
