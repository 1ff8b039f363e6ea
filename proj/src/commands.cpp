#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kpv/checks.hpp"
#include "kpv/cli_io.hpp"
#include "kpv/errors.hpp"
#include "kpv/invariants.hpp"
#include "kpv/lumps.hpp"
#include "kpv/weights.hpp"

namespace fs = std::filesystem;

namespace kpv {

Field initial_field(const RunConfig& cfg) {
    const Grid& g = cfg.grid;
    const InitConfig& in = cfg.init;
    LumpParams lp;
    lp.c = in.c;
    lp.x0 = in.x0;
    lp.y0 = in.y0;
    switch (in.kind) {
        case InitKind::MovingLump: lp.beta = in.beta; [[fallthrough]];
        case InitKind::Lump: return in.periodic ? periodic_lump_field(g, lp) : lump_field(g, lp);
        case InitKind::GaussianXDerivative: {
            const double a = in.amplitude, s = in.sigma, x0 = in.x0, y0 = in.y0;
            return Field::sample(g, [=](double x, double y) {
                const double X = x - x0, Y = y - y0;
                return -a * 2 * X / s * std::exp(-(X * X + Y * Y) / (s * s));
            });
        }
        case InitKind::LineSoliton:
            return Field::sample(g, [&](double x, double y) { return kdv_line_soliton(x - in.x0, y, in.c); });
        case InitKind::SnapshotFile: return snapshot_field(read_snapshot(in.path), g);
    }
    throw std::logic_error("unhandled init kind");
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& f, double t_from) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = 0; i < t.size() && i < f.size(); ++i) {
        if (t[i] < t_from || f[i] == 0 || !(t[i] > 0)) continue;
        const double x = std::log(t[i]), y = std::log(std::abs(f[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || den <= 0) return std::nan("");
    return (n * sxy - sx * sy) / den;
}

RunSummary simulate(const RunConfig& cfg, std::ostream& csv, const std::string& snap_dir) {
    RunSummary out;
    const ProjectionReport proj = project_initial_data(initial_field(cfg));
    out.removed_mass = proj.removed_mass;
    KpModel m = cfg.model;
    const double dt_max = m.dt > 0 ? m.dt : suggest_dt(proj.u, m.cfl);
    m.dt = dt_for_cadence(dt_max, cfg.output_every);
    m.validate();
    out.dt = m.dt;

    Solver solver(cfg.grid, m);
    solver.set_ceiling_from(proj.u);
    const WeightProfile w = build_weight_profile();
    DiagnosticsSeries series;
    const long snap_every =
        cfg.outputs.snapshot_every > 0 ? std::lround(cfg.outputs.snapshot_every / cfg.output_every) : 0;
    long tick = 0;

    csv << csv_header() << '\n';
    SimState st{cfg.t_start, proj.u};
    solver.run(st, cfg.t_end, cfg.output_every, [&](const SimState& s) {
        const DiagnosticsRow row = diagnostics(s.u, s.t, m.kappa, cfg.schedule, w);
        series.push(row);
        csv << csv_row(row) << '\n';
        out.region_outside_box = out.region_outside_box || row.region_outside_box;
        out.resolution_warning = out.resolution_warning || row.conserved.resolution_warning;
        if (!snap_dir.empty() && snap_every > 0 && tick % snap_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%06ld.kpf", tick / snap_every);
            write_snapshot((fs::path(snap_dir) / name).string(), s.u, s.t);
        }
        ++tick;
    });
    out.rows = series.rows();
    return out;
}

namespace {

nlohmann::ordered_json metadata(const RunConfig& cfg, const RunSummary& r) {
    const WeightProfile w = build_weight_profile();
    nlohmann::ordered_json j;
    j["kappa"] = cfg.model.kappa;
    j["dt"] = r.dt;
    j["t_start"] = cfg.t_start;
    j["t_end"] = cfg.t_end;
    j["output_every"] = cfg.output_every;
    j["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"lx", cfg.grid.lx}, {"ly", cfg.grid.ly}};
    const ScheduleParams& s = cfg.schedule;
    j["schedule"] = {{"b", s.b},   {"r", s.r},   {"q", s.q},     {"p", s.p},       {"m1", s.m1},
                     {"m2", s.m2}, {"l1", s.l1}, {"l2", s.l2},   {"eps", s.eps},   {"eta0", s.eta0}};
    j["init"] = init_kind_name(cfg.init.kind);
    j["removed_xmean_mass"] = r.removed_mass;
    j["weights"] = {{"c_phi_pinned", w.c_phi()},
                    {"c_phi_measured", w.c_phi_measured()},
                    {"chi_lower_pinned", w.chi_lower()},
                    {"chi_lower_measured", w.chi_lower_measured()}};
    j["omega2_band_factor"] = kFarBandFactor;
    j["notes"] = {"d_x^{-1} of weight products is taken by one-dimensional quadrature from -infinity, not "
                  "spectrally, since the weights are not x-mean-free on the box",
                  "omega2 is the band theta/f <= |x| or |y| <= f theta with f = omega2_band_factor"};
    j["warnings"] = {{"region_outside_box", r.region_outside_box},
                     {"second_energy_resolution", r.resolution_warning}};
    return j;
}

void report_warnings(const RunSummary& r, std::ostream& err) {
    if (r.region_outside_box) err << "warning: a diagnostic region reaches past the periodic box\n";
    if (r.resolution_warning) err << "warning: second energy is under-resolved (spectral tail above limit)\n";
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
}

}  // namespace

int cmd_run(const RunConfig& cfg, const std::string& out_dir, std::ostream& err) {
    try {
        fs::create_directories(out_dir);
        const fs::path csv_path = fs::path(out_dir) / cfg.outputs.csv;
        RunSummary r;
        {
            std::ofstream csv = open_out(csv_path);
            r = simulate(cfg, csv, out_dir);
        }
        open_out(fs::path(out_dir) / "metadata.json") << metadata(cfg, r).dump(2) << '\n';
        if (cfg.outputs.plot_script)
            emit_plot_script(csv_path.string(), (fs::path(out_dir) / csv_path.stem()).string() + ".gp");
        report_warnings(r, err);
        return 0;
    } catch (const BlowUp& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const NonZeroXMean& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_verify(const RunConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> names = cfg.verify.empty() ? check_names() : cfg.verify;
    std::ostringstream report;
    bool all = true;
    for (const auto& n : names) {
        std::string line;
        try {
            const CheckResult r = run_check(n, cfg.schedule);
            line = format_check(r);
            all = all && r.pass;
        } catch (const std::exception& e) {
            line = n + " ERROR " + e.what();
            all = false;
        }
        report << line << '\n';
        out << line << std::endl;
    }
    if (!out_dir.empty()) {
        try {
            fs::create_directories(out_dir);
            open_out(fs::path(out_dir) / "verify.txt") << report.str();
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return all ? 0 : 1;
}

namespace {

struct SweepPoint {
    double b = 0, r = 0, q = 0;
    int kappa = 1;
    std::string status = "ok", reason;
    double slope_I = NAN, slope_mass1 = NAN, slope_mass2 = NAN, mass1_first = NAN, mass1_last = NAN;
};

template <class T>
std::vector<T> sorted_or(std::vector<T> v, T fallback) {
    if (v.empty()) return {fallback};
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* e = std::getenv("KPV_WORKERS")) {
        const int n = std::atoi(e);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& err, int workers) {
    std::vector<SweepPoint> points;
    for (double b : sorted_or(cfg.sweep.b, cfg.schedule.b))
        for (double r : sorted_or(cfg.sweep.r, cfg.schedule.r))
            for (double q : sorted_or(cfg.sweep.q, cfg.schedule.q))
                for (int k : sorted_or(cfg.sweep.kappa, cfg.model.kappa)) {
                    SweepPoint p;
                    p.b = b, p.r = r, p.q = q, p.kappa = k;
                    points.push_back(p);
                }

    try {
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            SweepPoint& p = points[i];
            RunConfig c = cfg;
            c.schedule.b = p.b;
            c.schedule.r = p.r;
            c.schedule.q = p.q;
            if (!cfg.sweep.b.empty()) c.schedule.p = 1 - p.b;
            c.model.kappa = p.kappa;
            try {
                c.schedule.validate();
            } catch (const ValidationError& e) {
                p.status = "skipped";
                p.reason = e.what();
                continue;
            }
            char name[32];
            std::snprintf(name, sizeof name, "run_%03zu.csv", i);
            try {
                std::ofstream csv = open_out(fs::path(out_dir) / name);
                const RunSummary r = simulate(c, csv, "");
                std::vector<double> t, I, m1, m2;
                for (const auto& row : r.rows) {
                    t.push_back(row.t);
                    I.push_back(row.I);
                    m1.push_back(row.mass_omega1);
                    m2.push_back(row.mass_omega2);
                }
                const double from = cfg.sweep.fit_from * c.t_end;
                p.slope_I = loglog_slope(t, I, from);
                p.slope_mass1 = loglog_slope(t, m1, from);
                p.slope_mass2 = loglog_slope(t, m2, from);
                p.mass1_first = m1.front();
                p.mass1_last = m1.back();
            } catch (const std::exception& e) {
                p.status = "failed";
                p.reason = e.what();
                std::lock_guard<std::mutex> lock(err_mutex);
                err << "run " << i << " failed: " << e.what() << '\n';
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(worker_count(workers), int(points.size()));
    for (int k = 0; k < n; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    bool failed = false;
    std::ostringstream s;
    s << "run,b,r,q,kappa,status,slope_I,slope_mass_omega1,slope_mass_omega2,mass_omega1_first,mass_omega1_last,"
         "reason\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const SweepPoint& p = points[i];
        failed = failed || p.status == "failed";
        std::string reason = p.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        std::replace(reason.begin(), reason.end(), '\n', ' ');
        s << i << ',' << num(p.b) << ',' << num(p.r) << ',' << num(p.q) << ',' << p.kappa << ',' << p.status << ','
          << num(p.slope_I) << ',' << num(p.slope_mass1) << ',' << num(p.slope_mass2) << ',' << num(p.mass1_first)
          << ',' << num(p.mass1_last) << ',' << reason << '\n';
    }
    try {
        open_out(fs::path(out_dir) / "summary.csv") << s.str();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return failed ? 1 : 0;
}

int cmd_diag(const RunConfig& cfg, const std::string& snapshot_path, const std::string& out_dir, std::ostream& out,
             std::ostream& err) {
    try {
        const Snapshot snap = read_snapshot(snapshot_path);
        const Field u = snapshot_field(snap, cfg.grid);
        if (snap.t < cfg.schedule.t_start)
            throw std::domain_error("snapshot time " + num(snap.t) + " precedes t_start " + num(cfg.schedule.t_start));
        const DiagnosticsRow row = diagnostics(u, snap.t, cfg.model.kappa, cfg.schedule, build_weight_profile());
        const std::string text = csv_header() + '\n' + csv_row(row) + '\n';
        out << text;
        if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            open_out(fs::path(out_dir) / "diag.csv") << text;
        }
        if (row.region_outside_box) err << "warning: a diagnostic region reaches past the periodic box\n";
        return 0;
    } catch (const NonZeroXMean& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace kpv
