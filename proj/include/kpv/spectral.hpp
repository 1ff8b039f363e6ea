#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace kpv {

using cplx = std::complex<double>;

// Periodic box [-lx/2, lx/2) x [-ly/2, ly/2) sampled at nx x ny points.
struct Grid {
    int nx = 0, ny = 0;
    double lx = 0, ly = 0;

    Grid() = default;
    Grid(int nx, int ny, double lx, double ly);

    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double x(int i) const { return -0.5 * lx + i * dx(); }
    double y(int j) const { return -0.5 * ly + j * dy(); }
    double cell() const { return dx() * dy(); }
    std::size_t size() const { return std::size_t(nx) * ny; }

    // Half-spectrum layout: ny rows of nkx = nx/2 + 1 columns.
    int nkx() const { return nx / 2 + 1; }
    std::size_t spec_size() const { return std::size_t(nkx()) * ny; }
    // Signed mode numbers; the Nyquist index is reported as +n/2.
    int mode_x(int jx) const { return jx; }
    int mode_y(int jy) const { return jy <= ny / 2 ? jy : jy - ny; }
    double kx(int jx) const;
    double ky(int jy) const;

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

// Real field in physical space. Row index is y, column index is x.
struct Field {
    Grid grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(const Grid& g, double value = 0.0) : grid(g), v(g.size(), value) {}

    double& operator()(int i, int j) { return v[std::size_t(j) * grid.nx + i]; }
    double operator()(int i, int j) const { return v[std::size_t(j) * grid.nx + i]; }

    static Field sample(const Grid& g, const std::function<double(double, double)>& f);

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(const Field& o);
    Field& operator*=(double s);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);

// Fourier coefficients of a real field, half-spectrum storage.
//
// Normalization: c(k) = (1/(nx*ny)) * sum_x f(x) exp(-i k.x), so that
// f(x) = sum_k c(k) exp(i k.x) over the full (conjugate-symmetric) spectrum and
// Parseval reads  dx*dy*sum f^2 = lx*ly * sum_{full k} |c(k)|^2.
struct Spectrum {
    Grid grid;
    std::vector<cplx> c;

    Spectrum() = default;
    explicit Spectrum(const Grid& g) : grid(g), c(g.spec_size(), cplx(0.0)) {}

    cplx& operator()(int jx, int jy) { return c[std::size_t(jy) * grid.nkx() + jx]; }
    cplx operator()(int jx, int jy) const { return c[std::size_t(jy) * grid.nkx() + jx]; }

    // Coefficient for signed modes (mx, my) over the full spectrum, using conjugate symmetry.
    cplx coefficient(int mx, int my) const;
    // sum over the full spectrum of |c|^2, counting the implicit mirrored half.
    double energy_sum() const;
};

Spectrum to_spectral(const Field& f);
Field from_spectral(const Spectrum& s);

// Multipliers applied in place on a spectrum.
void apply_deriv_x(Spectrum& s, int order);
void apply_deriv_y(Spectrum& s, int order);
// Division by i*kx with the kx = 0 and Nyquist columns zeroed.
void apply_antideriv_x(Spectrum& s);
void apply_project_zero_xmean(Spectrum& s);
void apply_dealias(Spectrum& s);
bool dealias_keeps(const Grid& g, int jx, int jy);

// Relative size of the kx = 0 column: sqrt(sum |c(0,ky)|^2 / sum |c|^2).
double xmean_fraction(const Spectrum& s);
inline constexpr double kXMeanTolerance = 1e-10;

Field deriv_x(const Field& f, int order);
Field deriv_y(const Field& f, int order);

// Periodic antiderivative. Throws NonZeroXMean unless `project` is set or the
// kx = 0 column is below kXMeanTolerance.
Field antideriv_x(const Field& f, bool project = false);
Spectrum antideriv_x(const Spectrum& s, bool project = false);
Field project_zero_xmean(const Field& f);
Spectrum dealias(Spectrum s);
Field dealias(const Field& f);

double integral(const Field& f);
// p = +infinity gives the sup norm.
double lp_norm(const Field& f, double p);
double sup_norm(const Field& f);
double l2_norm(const Field& f);

}  // namespace kpv
