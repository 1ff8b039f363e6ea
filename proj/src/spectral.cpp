#include "kpv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "kpv/errors.hpp"

namespace kpv {

namespace {

// FFTW planning is not thread safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class Fft2d {
  public:
    Fft2d(int nx, int ny) : nx_(nx), ny_(ny) {
        const std::size_t nr = std::size_t(nx) * ny;
        const std::size_t nc = std::size_t(nx / 2 + 1) * ny;
        real_ = fftw_alloc_real(nr);
        spec_ = fftw_alloc_complex(nc);
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_r2c_2d(ny, nx, real_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(ny, nx, spec_, real_, FFTW_ESTIMATE);
    }
    ~Fft2d() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    void forward(const double* in, cplx* out) {
        const std::size_t nr = std::size_t(nx_) * ny_;
        std::copy(in, in + nr, real_);
        fftw_execute(fwd_);
        const double scale = 1.0 / double(nr);
        const std::size_t nc = std::size_t(nx_ / 2 + 1) * ny_;
        for (std::size_t k = 0; k < nc; ++k) out[k] = cplx(spec_[k][0] * scale, spec_[k][1] * scale);
    }
    void backward(const cplx* in, double* out) {
        const std::size_t nc = std::size_t(nx_ / 2 + 1) * ny_;
        for (std::size_t k = 0; k < nc; ++k) {
            spec_[k][0] = in[k].real();
            spec_[k][1] = in[k].imag();
        }
        fftw_execute(bwd_);
        std::copy(real_, real_ + std::size_t(nx_) * ny_, out);
    }

  private:
    int nx_, ny_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

// One plan set per thread and grid shape.
Fft2d& fft_for(const Grid& g) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<Fft2d>> cache;
    auto key = std::make_pair(g.nx, g.ny);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Fft2d>(g.nx, g.ny)).first;
    return *it->second;
}

void require_same(const Grid& a, const Grid& b) {
    if (a != b) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

Grid::Grid(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (nx < 8 || ny < 8 || nx % 2 || ny % 2)
        throw std::invalid_argument("grid sizes must be even and >= 8");
    if (!(lx > 0) || !(ly > 0)) throw std::invalid_argument("box lengths must be positive");
}

double Grid::kx(int jx) const { return 2.0 * M_PI * mode_x(jx) / lx; }
double Grid::ky(int jy) const { return 2.0 * M_PI * mode_y(jy) / ly; }

Field Field::sample(const Grid& g, const std::function<double(double, double)>& f) {
    Field out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
}

Field& Field::operator+=(const Field& o) {
    require_same(grid, o.grid);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
    return *this;
}
Field& Field::operator-=(const Field& o) {
    require_same(grid, o.grid);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
    return *this;
}
Field& Field::operator*=(const Field& o) {
    require_same(grid, o.grid);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= o.v[k];
    return *this;
}
Field& Field::operator*=(double s) {
    for (double& x : v) x *= s;
    return *this;
}
Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, const Field& b) { return a *= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

cplx Spectrum::coefficient(int mx, int my) const {
    const int nx = grid.nx, ny = grid.ny;
    if (mx < -nx / 2 || mx > nx / 2 || my < -ny / 2 || my > ny / 2)
        throw std::out_of_range("mode outside the grid");
    auto wrap = [ny](int m) { return ((m % ny) + ny) % ny; };
    if (mx >= 0) return (*this)(mx, wrap(my));
    return std::conj((*this)(-mx, wrap(-my)));
}

double Spectrum::energy_sum() const {
    const int nk = grid.nkx();
    double s = 0;
    for (int jy = 0; jy < grid.ny; ++jy)
        for (int jx = 0; jx < nk; ++jx) {
            const double w = (jx == 0 || jx == grid.nx / 2) ? 1.0 : 2.0;
            s += w * std::norm((*this)(jx, jy));
        }
    return s;
}

Spectrum to_spectral(const Field& f) {
    Spectrum s(f.grid);
    fft_for(f.grid).forward(f.v.data(), s.c.data());
    return s;
}

Field from_spectral(const Spectrum& s) {
    Field f(s.grid);
    fft_for(s.grid).backward(s.c.data(), f.v.data());
    return f;
}

namespace {
cplx ipow(int order) {
    switch (order % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}
}  // namespace

void apply_deriv_x(Spectrum& s, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    if (order == 0) return;
    const Grid& g = s.grid;
    const cplx ph = ipow(order);
    for (int jy = 0; jy < g.ny; ++jy)
        for (int jx = 0; jx < g.nkx(); ++jx) {
            const bool kill = (order % 2 == 1) && jx == g.nx / 2;
            s(jx, jy) = kill ? cplx(0.0) : s(jx, jy) * ph * std::pow(g.kx(jx), order);
        }
}

void apply_deriv_y(Spectrum& s, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    if (order == 0) return;
    const Grid& g = s.grid;
    const cplx ph = ipow(order);
    for (int jy = 0; jy < g.ny; ++jy) {
        const bool kill = (order % 2 == 1) && jy == g.ny / 2;
        const cplx m = kill ? cplx(0.0) : ph * std::pow(g.ky(jy), order);
        for (int jx = 0; jx < g.nkx(); ++jx) s(jx, jy) *= m;
    }
}

void apply_antideriv_x(Spectrum& s) {
    const Grid& g = s.grid;
    for (int jy = 0; jy < g.ny; ++jy)
        for (int jx = 0; jx < g.nkx(); ++jx) {
            if (jx == 0 || jx == g.nx / 2)
                s(jx, jy) = 0.0;
            else
                s(jx, jy) /= cplx(0.0, g.kx(jx));
        }
}

void apply_project_zero_xmean(Spectrum& s) {
    for (int jy = 0; jy < s.grid.ny; ++jy) s(0, jy) = 0.0;
}

// 2/3 rule: keep |m| with 3|m| < n in each direction.
bool dealias_keeps(const Grid& g, int jx, int jy) {
    return 3 * std::abs(g.mode_x(jx)) < g.nx && 3 * std::abs(g.mode_y(jy)) < g.ny;
}

void apply_dealias(Spectrum& s) {
    const Grid& g = s.grid;
    for (int jy = 0; jy < g.ny; ++jy)
        for (int jx = 0; jx < g.nkx(); ++jx)
            if (!dealias_keeps(g, jx, jy)) s(jx, jy) = 0.0;
}

double xmean_fraction(const Spectrum& s) {
    double col = 0;
    for (int jy = 0; jy < s.grid.ny; ++jy) col += std::norm(s(0, jy));
    const double tot = s.energy_sum();
    if (tot == 0) return 0.0;
    return std::sqrt(col / tot);
}

Field deriv_x(const Field& f, int order) {
    Spectrum s = to_spectral(f);
    apply_deriv_x(s, order);
    return from_spectral(s);
}

Field deriv_y(const Field& f, int order) {
    Spectrum s = to_spectral(f);
    apply_deriv_y(s, order);
    return from_spectral(s);
}

Spectrum antideriv_x(const Spectrum& s0, bool project) {
    if (!project && xmean_fraction(s0) > kXMeanTolerance)
        throw NonZeroXMean("antiderivative needs x-mean-free data (relative x-mean " +
                           std::to_string(xmean_fraction(s0)) + ")");
    Spectrum s = s0;
    apply_antideriv_x(s);
    return s;
}

Field antideriv_x(const Field& f, bool project) {
    return from_spectral(antideriv_x(to_spectral(f), project));
}

Field project_zero_xmean(const Field& f) {
    Spectrum s = to_spectral(f);
    apply_project_zero_xmean(s);
    return from_spectral(s);
}

Spectrum dealias(Spectrum s) {
    apply_dealias(s);
    return s;
}

Field dealias(const Field& f) { return from_spectral(dealias(to_spectral(f))); }

double integral(const Field& f) {
    double s = 0;
    for (double x : f.v) s += x;
    return s * f.grid.cell();
}

double sup_norm(const Field& f) {
    double m = 0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double l2_norm(const Field& f) {
    double s = 0;
    for (double x : f.v) s += x * x;
    return std::sqrt(s * f.grid.cell());
}

double lp_norm(const Field& f, double p) {
    if (std::isinf(p)) return sup_norm(f);
    if (!(p >= 1)) throw std::invalid_argument("lp_norm needs p >= 1");
    if (p == 2) return l2_norm(f);
    // Scale by the sup norm to keep large p from overflowing.
    const double m = sup_norm(f);
    if (m == 0) return 0.0;
    double s = 0;
    for (double x : f.v) s += std::pow(std::abs(x) / m, p);
    return m * std::pow(s * f.grid.cell(), 1.0 / p);
}

}  // namespace kpv
