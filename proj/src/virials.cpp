#include "kpv/virials.hpp"

#include <cmath>
#include <stdexcept>

#include "kpv/dynamics.hpp"
#include "kpv/errors.hpp"

namespace kpv {

WindowScales k_scales(double t, const ScheduleParams& s) {
    WindowScales k;
    k.sx = lambda(1, t, s);
    k.sy = lambda(2, t, s);
    k.rate_sx = lambda_rate(1, t, s);
    k.rate_sy = lambda_rate(2, t, s);
    k.rho1 = rho(1, t, s);
    k.rho2 = rho(2, t, s);
    k.drho1 = rho_rate(1, t, s);
    k.drho2 = rho_rate(2, t, s);
    k.eta = eta(1, t, s);
    k.rate_eta = eta_rate(1, t, s);
    return k;
}

WindowScales j_scales(double t, const ScheduleParams& s) {
    WindowScales k = k_scales(t, s);
    k.sx = lambda(3, t, s);
    k.sy = lambda(4, t, s);
    k.rate_sx = lambda_rate(3, t, s);
    k.rate_sy = lambda_rate(4, t, s);
    k.eta = eta(2, t, s);
    k.rate_eta = eta_rate(2, t, s);
    return k;
}

WindowScales i_scales(double t, const ScheduleParams& s) {
    WindowScales k = k_scales(t, s);
    k.sx = lambda(5, t, s);
    k.sxq = std::pow(k.sx, s.q);
    k.sy = lambda(6, t, s);
    k.rate_sx = lambda_rate(5, t, s);
    k.rate_sxq = s.q * k.rate_sx;
    k.rate_sy = lambda_rate(6, t, s);
    k.eta = eta(3, t, s);
    k.rate_eta = eta_rate(3, t, s);
    return k;
}

FarScales far_scales(double t, const ScheduleParams& s) { return {theta(t, s), theta_rate(t, s)}; }

namespace {

using Profile1D = std::vector<double>;

template <class F>
Profile1D along_x(const Grid& g, double shift, double scale, F&& f) {
    Profile1D p(g.nx);
    for (int i = 0; i < g.nx; ++i) p[i] = f((g.x(i) - shift) / scale);
    return p;
}

template <class F>
Profile1D along_y(const Grid& g, double shift, double scale, F&& f) {
    Profile1D p(g.ny);
    for (int j = 0; j < g.ny; ++j) p[j] = f((g.y(j) - shift) / scale);
    return p;
}

Profile1D ones(int n) { return Profile1D(n, 1.0); }

Profile1D times(Profile1D a, const Profile1D& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    return a;
}

// int f(x,y) wx(x) wy(y)
double weighted(const Field& f, const Profile1D& wx, const Profile1D& wy) {
    const Grid& g = f.grid;
    double acc = 0;
    for (int j = 0; j < g.ny; ++j) {
        double row = 0;
        for (int i = 0; i < g.nx; ++i) row += f(i, j) * wx[i];
        acc += row * wy[j];
    }
    return acc * g.cell();
}

Field sq(const Field& f) { return f * f; }

// Evaluations of the window pieces.
struct KWindow {
    Profile1D psi, dpsi, Xdpsi, phi, dphi, Ydphi;
};

KWindow k_window(const WeightProfile& w, const Grid& g, const WindowScales& k) {
    KWindow r;
    r.psi = along_x(g, k.rho1, k.sx, [&](double X) { return w.psi(X); });
    r.dpsi = along_x(g, k.rho1, k.sx, [&](double X) { return w.phi(X); });
    r.Xdpsi = along_x(g, k.rho1, k.sx, [&](double X) { return X * w.phi(X); });
    r.phi = along_y(g, k.rho2, k.sy, [&](double Y) { return w.phi(Y); });
    r.dphi = along_y(g, k.rho2, k.sy, [&](double Y) { return w.phi(Y, 1); });
    r.Ydphi = along_y(g, k.rho2, k.sy, [&](double Y) { return Y * w.phi(Y, 1); });
    return r;
}

double far_weighted(const Field& f, const Profile1D& p, bool along_y_dir) {
    const Grid& g = f.grid;
    return along_y_dir ? weighted(f, ones(g.nx), p) : weighted(f, p, ones(g.ny));
}

template <class F>
Profile1D far_profile(const Grid& g, const FarScales& fs, bool y_dir, F&& f) {
    // Z = (x + theta)/theta
    return y_dir ? along_y(g, -fs.theta, fs.theta, f) : along_x(g, -fs.theta, fs.theta, f);
}

double far_functional(const Field& u, const WeightProfile& w, const FarScales& fs, bool y_dir, bool bump) {
    const auto p = far_profile(u.grid, fs, y_dir, [&](double Z) { return bump ? w.xi(Z) : w.chi(Z); });
    return 0.5 * far_weighted(sq(u), p, y_dir);
}

RateTerms far_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const FarScales& fs,
                         bool y_dir) {
    const Grid& g = u.grid;
    const auto chi = far_profile(g, fs, y_dir, [&](double Z) { return w.chi(Z); });
    const auto dchi = far_profile(g, fs, y_dir, [&](double Z) { return w.chi(Z, 1); });
    const auto Zdchi = far_profile(g, fs, y_dir, [&](double Z) { return Z * w.chi(Z, 1); });
    const Field u2 = sq(u);
    const double a11 = 0.5 * fs.rate_theta * far_weighted(u2, dchi, y_dir);
    const double a12 = -0.5 * fs.rate_theta * far_weighted(u2, Zdchi, y_dir);
    const double a2 = far_weighted(u * ut.dispersion_x, chi, y_dir);
    const double a3 = far_weighted(u * ut.dispersion_y, chi, y_dir);
    const double a4 = far_weighted(u * ut.nonlinear, chi, y_dir);
    const char* p = y_dir ? "B" : "A";
    return RateTerms{{{std::string(p) + "11", a11},
                      {std::string(p) + "12", a12},
                      {std::string(p) + "2", a2},
                      {std::string(p) + "3", a3},
                      {std::string(p) + "4", a4}}};
}

}  // namespace

double K_functional(const Field& u, const WeightProfile& w, const WindowScales& k) {
    const Grid& g = u.grid;
    const auto px = along_x(g, k.rho1, k.sx, [&](double X) { return w.psi(X); });
    const auto py = along_y(g, k.rho2, k.sy, [&](double Y) { return w.phi(Y); });
    return weighted(sq(u), px, py) / k.eta;
}

double J_functional(const Field& u, const WeightProfile& w, const WindowScales& k) {
    const Grid& g = u.grid;
    const Field v = dxinv_dy(u);
    const auto px = along_x(g, k.rho1, k.sx, [&](double X) { return w.phi(X); });
    const auto py = along_y(g, k.rho2, k.sy, [&](double Y) { return w.psi(Y); });
    return weighted(u * v, px, py) / k.eta;
}

double I_functional(const Field& u, const WeightProfile& w, const WindowScales& k) {
    const Grid& g = u.grid;
    const auto px = times(along_x(g, k.rho1, k.sx, [&](double X) { return w.psi(X); }),
                          along_x(g, k.rho1, k.sxq, [&](double X) { return w.phi(X); }));
    const auto py = along_y(g, k.rho2, k.sy, [&](double Y) { return w.phi(Y); });
    return weighted(u, px, py) / k.eta;
}

double Lx_functional(const Field& u, const WeightProfile& w, const FarScales& f) {
    return far_functional(u, w, f, false, false);
}
double Ly_functional(const Field& u, const WeightProfile& w, const FarScales& f) {
    return far_functional(u, w, f, true, false);
}
double Mx_functional(const Field& u, const WeightProfile& w, const FarScales& f) {
    return far_functional(u, w, f, false, true);
}
double My_functional(const Field& u, const WeightProfile& w, const FarScales& f) {
    return far_functional(u, w, f, true, true);
}

Tendency tendency_parts(const Field& u, int kappa, bool dealias_on, bool nonlinear_on) {
    const Spectrum uh = to_spectral(u);
    if (xmean_fraction(uh) > kXMeanTolerance) throw NonZeroXMean("rate terms need x-mean-free data");
    Spectrum sx = uh, sy = uh;
    apply_deriv_x(sx, 3);
    apply_deriv_y(sy, 2);
    apply_antideriv_x(sy);
    for (auto& c : sx.c) c = -c;
    for (auto& c : sy.c) c *= -double(kappa);
    Tendency t;
    t.dispersion_x = from_spectral(sx);
    t.dispersion_y = from_spectral(sy);
    t.nonlinear = nonlinear_on ? from_spectral(nonlinear_tendency(uh, dealias_on)) : Field(u.grid);
    return t;
}

double RateTerms::sum() const {
    double s = 0;
    for (const auto& t : terms) s += t.value;
    return s;
}

double RateTerms::abs_sum() const {
    double s = 0;
    for (const auto& t : terms) s += std::abs(t.value);
    return s;
}

double RateTerms::operator[](const std::string& name) const {
    for (const auto& t : terms)
        if (t.name == name) return t.value;
    throw std::out_of_range("no rate term named " + name);
}

RateTerms lx_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const FarScales& f) {
    return far_rate_terms(u, ut, w, f, false);
}

RateTerms ly_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const FarScales& f) {
    return far_rate_terms(u, ut, w, f, true);
}

RateTerms k_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const WindowScales& k) {
    const Grid& g = u.grid;
    const KWindow W = k_window(w, g, k);
    const Field u2 = sq(u);
    const double c = 2 / k.eta;
    RateTerms r;
    r.terms = {
        {"K11", c * weighted(u * ut.dispersion_x, W.psi, W.phi)},
        {"K12", c * weighted(u * ut.dispersion_y, W.psi, W.phi)},
        {"K13", c * weighted(u * ut.nonlinear, W.psi, W.phi)},
        {"K2", -k.rate_eta * weighted(u2, W.psi, W.phi) / k.eta},
        {"K31", -k.rate_sx / k.eta * weighted(u2, W.Xdpsi, W.phi)},
        {"K32", -k.rate_sy / k.eta * weighted(u2, W.psi, W.Ydphi)},
        {"K33", -k.drho1 / (k.sx * k.eta) * weighted(u2, W.dpsi, W.phi)},
        {"K34", -k.drho2 / (k.sy * k.eta) * weighted(u2, W.psi, W.dphi)},
    };
    return r;
}

RateTerms j_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const WindowScales& k) {
    const Grid& g = u.grid;
    const Field v = dxinv_dy(u);
    const Field vt = dxinv_dy(ut.total());
    // Psi = phi(X) psi(Y)
    const auto fx = along_x(g, k.rho1, k.sx, [&](double X) { return w.phi(X); });
    const auto dfx = along_x(g, k.rho1, k.sx, [&](double X) { return w.phi(X, 1); });
    const auto Xdfx = along_x(g, k.rho1, k.sx, [&](double X) { return X * w.phi(X, 1); });
    const auto gy = along_y(g, k.rho2, k.sy, [&](double Y) { return w.psi(Y); });
    const auto dgy = along_y(g, k.rho2, k.sy, [&](double Y) { return w.phi(Y); });
    const auto Ydgy = along_y(g, k.rho2, k.sy, [&](double Y) { return Y * w.phi(Y); });
    const Field uv = u * v;
    RateTerms r;
    r.terms = {
        {"J1", -k.rate_eta * weighted(uv, fx, gy) / k.eta},
        {"J211", weighted(ut.dispersion_y * v, fx, gy) / k.eta},
        {"J212", weighted(ut.dispersion_x * v, fx, gy) / k.eta},
        {"J213", weighted(ut.nonlinear * v, fx, gy) / k.eta},
        {"J22", weighted(u * vt, fx, gy) / k.eta},
        {"J31", -k.rate_sx / k.eta * weighted(uv, Xdfx, gy)},
        {"J32", -k.rate_sy / k.eta * weighted(uv, fx, Ydgy)},
        {"J33", -k.drho1 / (k.sx * k.eta) * weighted(uv, dfx, gy)},
        {"J34", -k.drho2 / (k.sy * k.eta) * weighted(uv, fx, dgy)},
    };
    return r;
}

RateTerms i_rate_terms(const Field& u, const Tendency& ut, const WeightProfile& w, const WindowScales& k) {
    const Grid& g = u.grid;
    // W = psi(X) phi(Xq) phi(Y)
    const auto a = along_x(g, k.rho1, k.sx, [&](double X) { return w.psi(X); });
    const auto da = along_x(g, k.rho1, k.sx, [&](double X) { return w.phi(X); });
    const auto Xda = along_x(g, k.rho1, k.sx, [&](double X) { return X * w.phi(X); });
    const auto b = along_x(g, k.rho1, k.sxq, [&](double X) { return w.phi(X); });
    const auto db = along_x(g, k.rho1, k.sxq, [&](double X) { return w.phi(X, 1); });
    const auto Xdb = along_x(g, k.rho1, k.sxq, [&](double X) { return X * w.phi(X, 1); });
    const auto c = along_y(g, k.rho2, k.sy, [&](double Y) { return w.phi(Y); });
    const auto dc = along_y(g, k.rho2, k.sy, [&](double Y) { return w.phi(Y, 1); });
    const auto Ydc = along_y(g, k.rho2, k.sy, [&](double Y) { return Y * w.phi(Y, 1); });
    const auto ab = times(a, b);
    const double e = 1 / k.eta;
    RateTerms r;
    r.terms = {
        {"I111", e * weighted(ut.dispersion_x, ab, c)},
        {"I112", e * weighted(ut.dispersion_y, ab, c)},
        {"I11n", e * weighted(ut.nonlinear, ab, c)},
        {"I12", -k.rate_sx * e * weighted(u, times(Xda, b), c)},
        {"I13", -k.rate_sxq * e * weighted(u, times(a, Xdb), c)},
        {"I14", -k.rate_sy * e * weighted(u, ab, Ydc)},
        {"I15", -k.drho1 / k.sx * e * weighted(u, times(da, b), c)},
        {"I16", -k.drho1 / k.sxq * e * weighted(u, times(a, db), c)},
        {"I17", -k.drho2 / k.sy * e * weighted(u, ab, dc)},
        {"I2", -k.rate_eta * e * weighted(u, ab, c)},
    };
    return r;
}

RateTerms expanded_terms(const Field& u, int kappa, const WeightProfile& w, const WindowScales& kk,
                         const WindowScales& ii, const FarScales& f) {
    const Grid& g = u.grid;
    const Field ux = deriv_x(u, 1), v = dxinv_dy(u), u2 = sq(u);
    RateTerms r;

    // K window: Phi = psi(X) phi(Y); d_X^n Phi = phi^{(n-1)}(X) phi(Y).
    const auto phiY = along_y(g, kk.rho2, kk.sy, [&](double Y) { return w.phi(Y); });
    const auto dphiY = along_y(g, kk.rho2, kk.sy, [&](double Y) { return w.phi(Y, 1); });
    const auto d1 = along_x(g, kk.rho1, kk.sx, [&](double X) { return w.phi(X); });
    const auto d3 = along_x(g, kk.rho1, kk.sx, [&](double X) { return w.phi(X, 2); });
    const auto psiX = along_x(g, kk.rho1, kk.sx, [&](double X) { return w.psi(X); });
    const double e = 1 / kk.eta, s = kk.sx;
    r.terms.push_back({"K11", -3 * e / s * weighted(sq(ux), d1, phiY) + e / (s * s * s) * weighted(u2, d3, phiY)});
    r.terms.push_back({"K12", -kappa * e / s * weighted(sq(v), d1, phiY) +
                                  2 * kappa * e / kk.sy * weighted(u * v, psiX, dphiY)});
    r.terms.push_back({"K13", 2 * e / (3 * s) * weighted(u2 * u, d1, phiY)});

    const auto dchi = along_x(g, -f.theta, f.theta, [&](double Z) { return w.chi(Z, 1); });
    const auto d3chi = along_x(g, -f.theta, f.theta, [&](double Z) { return w.chi(Z, 3); });
    r.terms.push_back({"A2", -1.5 / f.theta * weighted(sq(ux), dchi, ones(g.ny)) +
                                 0.5 / (f.theta * f.theta * f.theta) * weighted(u2, d3chi, ones(g.ny))});

    // J211 at the K scales: d_Y Psi = phi(X) phi(Y).
    r.terms.push_back({"J211", kappa * 0.5 * e / kk.sy * weighted(sq(v), d1, phiY)});

    // I window: W = a(x) c(y), a = psi(X) phi(Xq).
    const double a5 = ii.sx, aq = ii.sxq;
    auto a_fn = [&](double x, int n) {
        // n-th x-derivative of psi((x-rho)/a5) phi((x-rho)/aq) by Leibniz.
        const double X = (x - ii.rho1) / a5, Xq = (x - ii.rho1) / aq;
        static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
        double acc = 0;
        for (int m = 0; m <= n; ++m)
            acc += binom[n][m] * w.psi(X, m) / std::pow(a5, m) * w.phi(Xq, n - m) / std::pow(aq, n - m);
        return acc;
    };
    Profile1D a1(g.nx), a3(g.nx), prim(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        a1[i] = a_fn(g.x(i), 1);
        a3[i] = a_fn(g.x(i), 3);
        // a is odd about rho1 and negative on its left, so its primitive from -infinity is -lhs.
        prim[i] = -localization_lhs(w, a5, aq, ii.rho1, g.x(i));
    }
    const auto cY = along_y(g, ii.rho2, ii.sy, [&](double Y) { return w.phi(Y); });
    const auto c2Y = along_y(g, ii.rho2, ii.sy, [&](double Y) { return w.phi(Y, 2); });
    const double ei = 1 / ii.eta;
    r.terms.push_back({"I111", ei * weighted(u, a3, cY)});
    r.terms.push_back({"I112", kappa * ei / (ii.sy * ii.sy) * weighted(u, prim, c2Y)});
    r.terms.push_back({"I11n", 0.5 * ei * weighted(u2, a1, cY)});
    return r;
}

std::vector<double> fd_derivative(const std::vector<double>& t, const std::vector<double>& f) {
    const std::size_t n = f.size();
    if (n < 5 || t.size() != n) throw InsufficientSamples("need at least five uniformly spaced samples");
    const double h = (t.back() - t.front()) / double(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::abs(h))
            throw std::invalid_argument("samples are not uniformly spaced");
    std::vector<double> d(n);
    const double c = 1 / (12 * h);
    d[0] = c * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
    d[1] = c * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = c * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
    d[n - 2] = c * (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]);
    d[n - 1] = c * (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]);
    return d;
}

RateResidual rate_check(const std::vector<double>& t, const std::vector<double>& values,
                        const std::vector<RateTerms>& terms) {
    if (terms.size() != values.size()) throw std::invalid_argument("one term set per sample is required");
    const auto d = fd_derivative(t, values);
    RateResidual r;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double e = std::abs(d[i] - terms[i].sum());
        if (e > r.max_abs) {
            r.max_abs = e;
            r.worst = i;
        }
        r.scale = std::max(r.scale, terms[i].abs_sum());
    }
    r.relative = r.scale > 0 ? r.max_abs / r.scale : r.max_abs;
    return r;
}

RegionMass region_mass(const Field& u, Region which, double t, const ScheduleParams& s, RegionField what) {
    const RegionMask m = region_mask(which, t, s, u.grid);
    Field f = what == RegionField::U ? u : what == RegionField::V ? dxinv_dy(u) : deriv_x(u, 1);
    return {0.5 * integral(sq(f) * m.mask), m.outside_box};
}

DecayIntegrals decay_integrals(const Field& u, double t, const ScheduleParams& s, const WeightProfile& w) {
    const Grid& g = u.grid;
    const WindowScales jk = j_scales(t, s), kk = k_scales(t, s);
    auto phi = [&](double X) { return w.phi(X); };
    const auto fx3 = along_x(g, jk.rho1, jk.sx, phi), fy4 = along_y(g, jk.rho2, jk.sy, phi);
    const auto fx1 = along_x(g, kk.rho1, kk.sx, phi), fy2 = along_y(g, kk.rho2, kk.sy, phi);
    Field au3 = u;
    for (double& x : au3.v) x = std::abs(x * x * x);
    const double tl = t * std::log(t);
    DecayIntegrals d;
    d.cubic = weighted(au3, fx3, fy4) / tl;
    d.v2 = weighted(sq(dxinv_dy(u)), fx3, fy4) / tl;
    d.ux2 = weighted(sq(deriv_x(u, 1)), fx1, fy2) / tl;
    return d;
}

DiagnosticsRow diagnostics(const Field& u, double t, int kappa, const ScheduleParams& s, const WeightProfile& w) {
    DiagnosticsRow r;
    r.t = t;
    const FarScales f = far_scales(t, s);
    r.K = K_functional(u, w, k_scales(t, s));
    r.J = J_functional(u, w, j_scales(t, s));
    r.I = I_functional(u, w, i_scales(t, s));
    r.Lx = Lx_functional(u, w, f);
    r.Ly = Ly_functional(u, w, f);
    r.Mx = Mx_functional(u, w, f);
    r.My = My_functional(u, w, f);
    const RegionMass m1 = region_mass(u, Region::Omega1, t, s);
    const RegionMass m2 = region_mass(u, Region::Omega2, t, s);
    const RegionMass m1v = region_mass(u, Region::Omega1Tilde, t, s, RegionField::V);
    const RegionMass m2x = region_mass(u, Region::Omega2Tilde, t, s, RegionField::Ux);
    r.mass_omega1 = m1.value;
    r.mass_omega2 = m2.value;
    r.mass_omega1tilde_v = m1v.value;
    r.mass_omega2tilde_ux = m2x.value;
    r.region_outside_box = m1.outside_box || m2.outside_box;
    r.conserved = conserved(u, kappa, t);
    return r;
}

void DiagnosticsSeries::push(const DiagnosticsRow& r) {
    if (!rows_.empty() && !(r.t > rows_.back().t)) throw std::invalid_argument("diagnostic times must increase");
    const ConservedRecord& c = r.conserved;
    for (double x : {r.t, r.K, r.J, r.I, r.Lx, r.Ly, r.Mx, r.My, r.mass_omega1, r.mass_omega2, r.mass_omega1tilde_v,
                     r.mass_omega2tilde_ux, c.mass, c.energy, c.momentum, c.second_energy})
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite diagnostic value");
    rows_.push_back(r);
}

}  // namespace kpv
