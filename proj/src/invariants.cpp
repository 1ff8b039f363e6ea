#include "kpv/invariants.hpp"

#include <cmath>
#include <stdexcept>

#include "kpv/errors.hpp"

namespace kpv {

namespace {

Spectrum checked_spectrum(const Field& u) {
    Spectrum s = to_spectral(u);
    if (xmean_fraction(s) > kXMeanTolerance) throw NonZeroXMean("field has a nonzero x-mean");
    return s;
}

Spectrum dxinv_dy_spec(Spectrum s) {
    apply_deriv_y(s, 1);
    apply_antideriv_x(s);
    return s;
}

Spectrum dxinv2_dy2_spec(Spectrum s) {
    apply_deriv_y(s, 2);
    apply_antideriv_x(s);
    apply_antideriv_x(s);
    return s;
}

double l2_of(const Spectrum& s) { return std::sqrt(s.grid.lx * s.grid.ly * s.energy_sum()); }

}  // namespace

double mass(const Field& u) { return 0.5 * integral(u * u); }

double energy(const Field& u, int kappa) {
    const Spectrum s = checked_spectrum(u);
    Spectrum sx = s;
    apply_deriv_x(sx, 1);
    const Field ux = from_spectral(sx);
    const Field v = from_spectral(dxinv_dy_spec(s));
    double acc = 0;
    for (std::size_t k = 0; k < u.v.size(); ++k) {
        const double a = u.v[k];
        acc += 0.5 * ux.v[k] * ux.v[k] - 0.5 * kappa * v.v[k] * v.v[k] - a * a * a / 6.0;
    }
    return acc * u.grid.cell();
}

double momentum(const Field& u) {
    const Field v = from_spectral(dxinv_dy_spec(checked_spectrum(u)));
    return 0.5 * integral(u * v);
}

Field dxinv_dy(const Field& u) { return from_spectral(dxinv_dy_spec(checked_spectrum(u))); }
Field dxinv2_dy2(const Field& u) { return from_spectral(dxinv2_dy2_spec(checked_spectrum(u))); }

SecondEnergy second_energy(const Field& u, int kappa) {
    const Grid& g = u.grid;
    const Spectrum s = checked_spectrum(u);
    Spectrum sxx = s, sy = s;
    apply_deriv_x(sxx, 2);
    apply_deriv_y(sy, 1);
    const Field uxx = from_spectral(sxx), uy = from_spectral(sy);
    const Field v = from_spectral(dxinv_dy_spec(s));
    const Field w = from_spectral(dxinv2_dy2_spec(s));

    double acc = 0;
    for (std::size_t k = 0; k < u.v.size(); ++k) {
        const double a = u.v[k], a2 = a * a;
        acc += 1.5 * uxx.v[k] * uxx.v[k] - 5.0 * kappa * uy.v[k] * uy.v[k] + 5.0 / 6.0 * w.v[k] * w.v[k] +
               5.0 / 6.0 * kappa * (a2 * w.v[k] + a * v.v[k] * v.v[k]) + 1.25 * a2 * uxx.v[k] +
               5.0 / 24.0 * a2 * a2;
    }
    SecondEnergy r;
    r.value = acc * g.cell();

    double total = 0, tail = 0;
    for (int jy = 0; jy < g.ny; ++jy)
        for (int jx = 0; jx < g.nkx(); ++jx) {
            // Columns 1..nx/2-1 stand for two conjugate modes.
            const double wgt = (jx == 0 || jx == g.nx / 2) ? 1.0 : 2.0;
            const double e = wgt * std::norm(sxx(jx, jy));
            total += e;
            if (4 * jx > g.nx || 4 * std::abs(g.mode_y(jy)) > g.ny) tail += e;
        }
    r.tail_fraction = total > 0 ? std::sqrt(tail / total) : 0.0;
    r.resolution_warning = r.tail_fraction > kSecondEnergyTailLimit;
    return r;
}

ConservedRecord conserved(const Field& u, int kappa, double t) {
    ConservedRecord r;
    r.t = t;
    r.mass = mass(u);
    r.energy = energy(u, kappa);
    r.momentum = momentum(u);
    const SecondEnergy f = second_energy(u, kappa);
    r.second_energy = f.value;
    r.resolution_warning = f.resolution_warning;
    return r;
}

double e1_norm(const Field& u) {
    const Spectrum s = checked_spectrum(u);
    Spectrum sx = s;
    apply_deriv_x(sx, 1);
    return l2_of(s) + l2_of(sx) + l2_of(dxinv_dy_spec(s));
}

double e2_norm(const Field& u) {
    const Spectrum s = checked_spectrum(u);
    Spectrum sxx = s;
    apply_deriv_x(sxx, 2);
    return l2_of(s) + l2_of(dxinv_dy_spec(s)) + l2_of(sxx) + l2_of(dxinv2_dy2_spec(s));
}

double dy_norm(const Field& u) { return l2_norm(deriv_y(u, 1)); }

double interpolation_ratio(const Field& u, double p) {
    if (!(p >= 2 && p <= 6)) throw std::invalid_argument("interpolation exponent must lie in [2, 6]");
    const Spectrum s = checked_spectrum(u);
    Spectrum sx = s;
    apply_deriv_x(sx, 1);
    const double n2 = l2_of(s), nx = l2_of(sx), nv = l2_of(dxinv_dy_spec(s));
    const double a = (6 - p) / (2 * p), b = (p - 2) / p, c = (p - 2) / (2 * p);
    constexpr double tiny = 1e-14;
    if (n2 < tiny || (b > 0 && nx < tiny) || (c > 0 && nv < tiny))
        throw DegenerateDenominator("interpolation denominator vanishes");
    return lp_norm(u, p) / (std::pow(n2, a) * std::pow(nx, b) * std::pow(nv, c));
}

}  // namespace kpv
