#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kpv/dynamics.hpp"
#include "kpv/schedules.hpp"
#include "kpv/spectral.hpp"
#include "kpv/virials.hpp"

namespace kpv {

// ---- configuration ----

enum class InitKind { Lump, MovingLump, GaussianXDerivative, LineSoliton, SnapshotFile };
const char* init_kind_name(InitKind k);

struct InitConfig {
    InitKind kind = InitKind::Lump;
    double c = 1, beta = 0, x0 = 0, y0 = 0;
    double amplitude = 1, sigma = 3;
    bool periodic = true;  // lumps: sum over periodic images instead of sampling
    std::string path;      // snapshot_file
};

struct OutputConfig {
    std::string csv = "diagnostics.csv";
    double snapshot_every = 0;  // 0: no snapshots
    bool plot_script = true;
};

struct SweepConfig {
    std::vector<double> b, r, q;
    std::vector<int> kappa;
    double fit_from = 0.25;  // slope fit over [fit_from * t_end, t_end]
};

struct RunConfig {
    KpModel model{.dt = 0};  // dt == 0 means "auto": suggest_dt at model.cfl
    double t_start = std::exp(2.0);
    double t_end = std::exp(2.0) + 4;
    double output_every = 0.1;
    Grid grid{256, 256, 64, 64};
    ScheduleParams schedule;
    InitConfig init;
    OutputConfig outputs;
    std::vector<std::string> verify;
    SweepConfig sweep;
};

// YAML document; grammar in README. Unknown or duplicate keys raise ParseError with the line;
// schedule constraints raise ValidationError whose message starts with the offending line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// ---- snapshots ----
// "KPF1", u32 nx, u32 ny, f64 lx, f64 ly, f64 t, nx*ny f64 row-major (y rows), all little-endian.

struct Snapshot {
    std::uint32_t nx = 0, ny = 0;
    double lx = 0, ly = 0, t = 0;
    std::vector<double> values;
};

void write_snapshot(const std::string& path, const Snapshot& s);
void write_snapshot(const std::string& path, const Field& u, double t);
// Throws BadMagic or TruncatedFile.
Snapshot read_snapshot(const std::string& path);
// Throws GridMismatch unless the snapshot was taken on `g`.
Field snapshot_field(const Snapshot& s, const Grid& g);

// ---- CSV and plotting ----

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const DiagnosticsRow& r);

// gnuplot script for conserved drifts, virial functionals (log axis) and region masses.
// Throws MissingCsv when the file is absent or has no header line.
std::string plot_script(const std::string& csv_path);
void emit_plot_script(const std::string& csv_path, const std::string& script_path);

// ---- commands ----

Field initial_field(const RunConfig& cfg);

struct RunSummary {
    std::vector<DiagnosticsRow> rows;
    double dt = 0;
    double removed_mass = 0;
    bool region_outside_box = false;
    bool resolution_warning = false;
};
// Evolves the configured run, streaming CSV rows to `csv` and writing snapshots into `snap_dir`
// (skipped when empty). Throws BlowUp or NonZeroXMean.
RunSummary simulate(const RunConfig& cfg, std::ostream& csv, const std::string& snap_dir);

// Each returns the process exit code; failures are described on `err`.
int cmd_run(const RunConfig& cfg, const std::string& out_dir, std::ostream& err);
int cmd_verify(const RunConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err);
// Workers: KPV_WORKERS if set, else the hardware concurrency.
int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& err, int workers = 0);
int cmd_diag(const RunConfig& cfg, const std::string& snapshot_path, const std::string& out_dir, std::ostream& out,
             std::ostream& err);

// Least-squares slope of log|f| against log t over samples with t >= t_from and f != 0.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& f, double t_from);

}  // namespace kpv
