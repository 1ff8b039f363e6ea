#pragma once

#include <vector>

#include "kpv/spectral.hpp"

namespace kpv {

// C-infinity step: 0 for s <= 0, 1 for s >= 1, e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}) between.
double smooth_step(double s, int deriv = 0);

// Weight family used by the virial functionals.
//   phi: even, 1 on [-1,1], e^{-|x|} for |x| >= 3/2, monotone transition on [1, 3/2].
//   psi: primitive of phi from 0 (odd, psi = x on [-1,1]).
//   chi: 1 for x <= -1, 0 for x >= 0, decreasing.
//   xi:  bump exp(1 - 1/(1 - z^2)), z = 4(x + 1/2), supported in [-3/4, -1/4].
// Derivative orders 0..3 are available for phi, chi and xi, 0..4 for psi.
class WeightProfile {
public:
    double phi(double x, int deriv = 0) const;
    double psi(double x, int deriv = 0) const;
    double chi(double x, int deriv = 0) const;
    double xi(double x, int deriv = 0) const;

    // |phi'| <= c_phi phi and |phi''| <= c_phi phi on the real line.
    double c_phi() const { return c_phi_; }
    // -chi' >= chi_lower on [-3/4, -1/4].
    double chi_lower() const { return chi_lower_; }
    // Measured values behind the pinned constants.
    double c_phi_measured() const { return c_phi_measured_; }
    double chi_lower_measured() const { return chi_lower_measured_; }

private:
    friend WeightProfile build_weight_profile();
    WeightProfile() = default;
    double psi_transition(double x) const;

    // psi at equispaced nodes of [1, 3/2], interpolated by cubic Hermite with psi' = phi.
    std::vector<double> psi_table_;
    double psi_edge_ = 0;  // psi(3/2)
    double c_phi_ = 0, chi_lower_ = 0;
    double c_phi_measured_ = 0, chi_lower_measured_ = 0;
};

inline constexpr double kPhiFlatEnd = 1.0;
inline constexpr double kPhiTransitionEnd = 1.5;
// Pinned bounds; the builder fails if the measured values cross them.
inline constexpr double kPinnedCPhi = 112.0;
inline constexpr double kPinnedChiLower = 1.08;

// Builds the profile and checks every property on 1e5 points of [-50, 50].
// Throws ConstructionFailed naming the first violated property.
WeightProfile build_weight_profile();

// |int_{-inf}^{x} psi((s - x0)/a) phi((s - x0)/b) ds|. The integrand is odd about x0, so
// the integral over (-inf, x] equals the one over (-inf, x0 - |x - x0|].
double localization_lhs(const WeightProfile& w, double a, double b, double x0, double x);

struct LocalizationReport {
    double max_ratio = 0;  // max of lhs / (9 b phi((x - x0)/b))
    double worst_x = 0;
    bool holds = false;  // max_ratio < 1
};
LocalizationReport localization_check(const WeightProfile& w, double a, double b, double x0,
                                      const std::vector<double>& xs);

// Scaled, shifted window (x - shift_x)/scale_x, (y - shift_y)/scale_y.
struct Window {
    double shift_x = 0, scale_x = 1, shift_y = 0, scale_y = 1;
};

// Phi(X,Y) = psi(X) phi(Y) and Psi(X,Y) = phi(X) psi(Y) at window coordinates.
// dx, dy are derivative orders with respect to X and Y (not x and y).
double big_phi(const WeightProfile& w, double X, double Y, int dx = 0, int dy = 0);
double big_psi(const WeightProfile& w, double X, double Y, int dx = 0, int dy = 0);
Field big_phi_field(const WeightProfile& w, const Grid& g, const Window& win, int dx = 0, int dy = 0);
Field big_psi_field(const WeightProfile& w, const Grid& g, const Window& win, int dx = 0, int dy = 0);

// f((x - shift)/scale) as a field constant in y, or in x when along_y is set.
template <class F>
Field profile_field(const Grid& g, F&& f, double shift, double scale, bool along_y) {
    Field out(g);
    if (along_y) {
        for (int j = 0; j < g.ny; ++j) {
            const double val = f((g.y(j) - shift) / scale);
            for (int i = 0; i < g.nx; ++i) out(i, j) = val;
        }
    } else {
        std::vector<double> row(g.nx);
        for (int i = 0; i < g.nx; ++i) row[i] = f((g.x(i) - shift) / scale);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) out(i, j) = row[i];
    }
    return out;
}

}  // namespace kpv
