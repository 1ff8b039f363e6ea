#include "kpv/weights.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <string>

#include "kpv/errors.hpp"

namespace kpv {

namespace {

// Truncated Taylor series c0 + c1 h + c2 h^2 + c3 h^3, enough for third derivatives.
struct Jet {
    std::array<double, 4> c{};
    double deriv(int k) const {
        static constexpr double fact[4] = {1, 1, 2, 6};
        return c[k] * fact[k];
    }
};

Jet constant(double a) { return Jet{{a, 0, 0, 0}}; }
Jet affine(double a, double slope) { return Jet{{a, slope, 0, 0}}; }

Jet operator+(Jet a, const Jet& b) {
    for (int k = 0; k < 4; ++k) a.c[k] += b.c[k];
    return a;
}
Jet operator-(Jet a, const Jet& b) {
    for (int k = 0; k < 4; ++k) a.c[k] -= b.c[k];
    return a;
}
Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; i + j < 4; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}
Jet recip(const Jet& a) {
    Jet r;
    r.c[0] = 1 / a.c[0];
    for (int k = 1; k < 4; ++k) {
        double s = 0;
        for (int j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = -s * r.c[0];
    }
    return r;
}
Jet exp(const Jet& a) {
    Jet r;
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k < 4; ++k) {
        double s = 0;
        for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
        r.c[k] = s / k;
    }
    return r;
}

// Outside [kStepGuard, 1 - kStepGuard] the step equals its limit to below 1e-200.
constexpr double kStepGuard = 0.002;

Jet step_jet(const Jet& s) {
    if (s.c[0] <= kStepGuard) return constant(0);
    if (s.c[0] >= 1 - kStepGuard) return constant(1);
    // 1 / (1 + e^{1/s - 1/(1-s)})
    const Jet g = recip(s) - recip(constant(1) - s);
    return recip(constant(1) + exp(g));
}

// phi on x >= 0 as a jet in x.
Jet phi_jet(double x) {
    if (x <= kPhiFlatEnd) return constant(1);
    const Jet ex = exp(affine(-x, -1));
    if (x >= kPhiTransitionEnd) return ex;
    const double w = kPhiTransitionEnd - kPhiFlatEnd;
    const Jet b = step_jet(affine((x - kPhiFlatEnd) / w, 1 / w));
    return constant(1) - b * (constant(1) - ex);
}

double odd_sign(int deriv) { return deriv % 2 ? -1.0 : 1.0; }

void check_order(int deriv, int max) {
    if (deriv < 0 || deriv > max) throw std::invalid_argument("unsupported derivative order");
}

}  // namespace

double smooth_step(double s, int deriv) {
    check_order(deriv, 3);
    return step_jet(affine(s, 1)).deriv(deriv);
}

double WeightProfile::phi(double x, int deriv) const {
    check_order(deriv, 3);
    // Even function: the k-th derivative has parity (-1)^k.
    const double v = phi_jet(std::abs(x)).deriv(deriv);
    return x < 0 ? odd_sign(deriv) * v : v;
}

double WeightProfile::psi_transition(double x) const {
    const int n = int(psi_table_.size()) - 1;
    const double h = (kPhiTransitionEnd - kPhiFlatEnd) / n;
    const int k = std::min(n - 1, int((x - kPhiFlatEnd) / h));
    const double x0 = kPhiFlatEnd + k * h, s = (x - x0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * psi_table_[k] + (s3 - 2 * s2 + s) * h * phi(x0) +
           (-2 * s3 + 3 * s2) * psi_table_[k + 1] + (s3 - s2) * h * phi(x0 + h);
}

double WeightProfile::psi(double x, int deriv) const {
    check_order(deriv, 4);
    if (deriv > 0) return phi(x, deriv - 1);
    const double ax = std::abs(x);
    double v;
    if (ax <= kPhiFlatEnd)
        v = ax;
    else if (ax <= kPhiTransitionEnd)
        v = psi_transition(ax);
    else
        v = psi_edge_ + std::exp(-kPhiTransitionEnd) - std::exp(-ax);
    return x < 0 ? -v : v;
}

double WeightProfile::chi(double x, int deriv) const {
    check_order(deriv, 3);
    const double s = step_jet(affine(x + 1, 1)).deriv(deriv);
    return deriv == 0 ? 1 - s : -s;
}

double WeightProfile::xi(double x, int deriv) const {
    check_order(deriv, 3);
    const Jet z = affine(4 * (x + 0.5), 4);
    const Jet q = constant(1) - z * z;
    if (q.c[0] <= kStepGuard) return 0;
    return exp(constant(1) - recip(q)).deriv(deriv);
}

WeightProfile build_weight_profile() {
    WeightProfile w;
    constexpr int nodes = 1024;
    const double step = (kPhiTransitionEnd - kPhiFlatEnd) / nodes;
    auto f = [&w](double s) { return w.phi(s); };
    w.psi_table_.assign(nodes + 1, 1.0);
    for (int k = 0; k < nodes; ++k) {
        const double a = kPhiFlatEnd + k * step;
        w.psi_table_[k + 1] = w.psi_table_[k] +
            boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + step, 0);
    }
    w.psi_edge_ = w.psi_table_.back();

    auto fail = [](const std::string& what, double x, double val) {
        std::ostringstream os;
        os.precision(17);
        os << what << " violated at x=" << x << " (value " << val << ")";
        throw ConstructionFailed(os.str());
    };

    constexpr int n = 100000;
    constexpr double lo = -50, hi = 50;
    const double h = (hi - lo) / (n - 1);
    double cphi = 0, chi_low = INFINITY;
    double cum = 0, prev_phi = w.phi(lo);  // trapezoid primitive of phi from lo
    const double psi_lo = w.psi(lo);
    for (int k = 0; k < n; ++k) {
        const double x = lo + k * h, ax = std::abs(x);
        const double p = w.phi(x), p1 = w.phi(x, 1), p2 = w.phi(x, 2);
        const double e = std::exp(-ax);
        if (!(p > 0)) fail("phi > 0", x, p);
        if (w.phi(-x) != p) fail("phi even", x, w.phi(-x) - p);
        if (ax <= 1 && p != 1) fail("phi = 1 on [-1,1]", x, p);
        if (ax >= 2 && std::abs(p - e) > 1e-15 * e) fail("phi = e^{-|x|} for |x| >= 2", x, p);
        if (p < e * (1 - 1e-14)) fail("phi >= e^{-|x|}", x, p / e);
        if (p > 3 * e) fail("phi <= 3 e^{-|x|}", x, p / e);
        if (x >= 0 && p1 > 0) fail("phi' <= 0 on x >= 0", x, p1);
        cphi = std::max({cphi, std::abs(p1) / p, std::abs(p2) / p});

        const double s = w.psi(x);
        if (w.psi(-x) != -s) fail("psi odd", x, w.psi(-x) + s);
        if (ax <= 1 && s != x) fail("psi = x on [-1,1]", x, s);
        if (std::abs(s) > 3) fail("|psi| <= 3", x, s);
        if (k > 0) cum += 0.5 * h * (p + prev_phi);
        prev_phi = p;
        // Trapezoid error is below h^2/12 max|phi''| * 100 < 1e-5.
        if (std::abs(psi_lo + cum - s) > 1e-5) fail("psi' = phi", x, psi_lo + cum - s);

        const double c = w.chi(x), c1 = w.chi(x, 1);
        if (x <= -1 && c != 1) fail("chi = 1 for x <= -1", x, c);
        if (x >= 0 && c != 0) fail("chi = 0 for x >= 0", x, c);
        if (c1 > 0) fail("chi' <= 0", x, c1);
        if (x >= -0.75 && x <= -0.25) chi_low = std::min(chi_low, -c1);

        const double b = w.xi(x);
        if (b < 0 || ((x < -0.75 || x > -0.25) && b != 0)) fail("xi >= 0 supported in [-3/4,-1/4]", x, b);
    }
    w.c_phi_measured_ = cphi;
    w.chi_lower_measured_ = chi_low;
    if (cphi > kPinnedCPhi) fail("c_phi below the pinned bound", 0, cphi);
    if (chi_low < kPinnedChiLower) fail("-chi' above the pinned bound on [-3/4,-1/4]", 0, chi_low);
    w.c_phi_ = kPinnedCPhi;
    w.chi_lower_ = kPinnedChiLower;
    return w;
}

namespace {

// int_{-inf}^{tau} psi(s/a) phi(s/b) ds for tau <= 0.
double left_primitive(const WeightProfile& w, double a, double b, double tau) {
    const double C = w.psi(INFINITY);
    // Below T both factors are pure exponentials: psi(s/a) = -(C - e^{s/a}), phi(s/b) = e^{s/b}.
    auto tail = [&](double T) {
        const double k = 1 / a + 1 / b;
        return -C * b * std::exp(T / b) + std::exp(T * k) / k;
    };
    const double T = -kPhiTransitionEnd * std::max(a, b);
    if (tau <= T) return tail(tau);
    auto g = [&](double s) { return w.psi(s / a) * w.phi(s / b); };
    std::vector<double> cuts = {T};
    for (double c : {-kPhiTransitionEnd * a, -kPhiFlatEnd * a, -kPhiTransitionEnd * b, -kPhiFlatEnd * b})
        if (c > T && c < tau) cuts.push_back(c);
    cuts.push_back(tau);
    std::sort(cuts.begin(), cuts.end());
    double acc = tail(T);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, cuts[i], cuts[i + 1], 8, 1e-12);
    return acc;
}

}  // namespace

double localization_lhs(const WeightProfile& w, double a, double b, double x0, double x) {
    if (!(a > 0 && b > 0)) throw std::invalid_argument("localization scales must be positive");
    return std::abs(left_primitive(w, a, b, -std::abs(x - x0)));
}

LocalizationReport localization_check(const WeightProfile& w, double a, double b, double x0,
                                      const std::vector<double>& xs) {
    LocalizationReport r;
    for (double x : xs) {
        const double ratio = localization_lhs(w, a, b, x0, x) / (9 * b * w.phi((x - x0) / b));
        if (ratio > r.max_ratio || xs.size() == 1) {
            r.max_ratio = ratio;
            r.worst_x = x;
        }
    }
    r.holds = r.max_ratio < 1;
    return r;
}

double big_phi(const WeightProfile& w, double X, double Y, int dx, int dy) {
    return w.psi(X, dx) * w.phi(Y, dy);
}

double big_psi(const WeightProfile& w, double X, double Y, int dx, int dy) {
    return w.phi(X, dx) * w.psi(Y, dy);
}

namespace {

Field separable(const Grid& g, const std::vector<double>& fx, const std::vector<double>& fy) {
    Field out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out(i, j) = fx[i] * fy[j];
    return out;
}

template <class FX, class FY>
Field window_field(const Grid& g, const Window& win, FX&& fx, FY&& fy) {
    std::vector<double> ax(g.nx), ay(g.ny);
    for (int i = 0; i < g.nx; ++i) ax[i] = fx((g.x(i) - win.shift_x) / win.scale_x);
    for (int j = 0; j < g.ny; ++j) ay[j] = fy((g.y(j) - win.shift_y) / win.scale_y);
    return separable(g, ax, ay);
}

}  // namespace

Field big_phi_field(const WeightProfile& w, const Grid& g, const Window& win, int dx, int dy) {
    return window_field(
        g, win, [&](double X) { return w.psi(X, dx); }, [&](double Y) { return w.phi(Y, dy); });
}

Field big_psi_field(const WeightProfile& w, const Grid& g, const Window& win, int dx, int dy) {
    return window_field(
        g, win, [&](double X) { return w.phi(X, dx); }, [&](double Y) { return w.psi(Y, dy); });
}

}  // namespace kpv
