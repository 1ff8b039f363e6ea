#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kpv/cli_io.hpp"
#include "kpv/errors.hpp"

using namespace kpv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("kpv_cli_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Short, small-grid run used by the command tests.
const char* kSmallRun = R"(model:
  kappa: 1
  t_end: 7.589056098930650
  output_every: 0.1
grid: {nx: 32, ny: 32, lx: 40, ly: 40}
init:
  kind: gaussian_x_derivative
  amplitude: 0.5
  sigma: 3
outputs:
  plot_script: true
)";

template <class E>
std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const E& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal lump config fills defaults") {
    const RunConfig c = parse_config("init:\n  kind: lump\n  c: 2\n");
    CHECK(c.init.kind == InitKind::Lump);
    CHECK(c.init.c == 2.0);
    CHECK(c.model.kappa == -1);
    CHECK(c.model.dt == 0.0);
    CHECK(c.t_start == doctest::Approx(std::exp(2.0)));
    CHECK(c.t_end == doctest::Approx(std::exp(2.0) + 4));
    CHECK(c.grid.nx == 256);
    CHECK(c.schedule.b == 0.3);
    CHECK(c.schedule.p == doctest::Approx(0.7));
    CHECK(c.outputs.csv == "diagnostics.csv");
    CHECK(c.verify.empty());

    const RunConfig d = parse_config("");
    CHECK(d.init.kind == InitKind::Lump);
}

TEST_CASE("schedule p follows b") {
    CHECK(parse_config("schedule:\n  b: 0.35\n").schedule.p == doctest::Approx(0.65));
    try {
        parse_config("schedule:\n  b: 0.35\n  p: 0.55\n");
        FAIL("p + b != 1 accepted");
    } catch (const ValidationError& e) {
        CHECK(e.constraint == "time_exponent");
        CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
    }
}

TEST_CASE("window exponent r = 1.5 is rejected with its line") {
    const std::string text = "model:\n  kappa: -1\nschedule:\n  b: 0.3\n  r: 1.5\n";
    CHECK_THROWS_AS(parse_config(text), ValidationError);
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        CHECK(e.constraint == "window_exponents");
        CHECK(std::string(e.what()).rfind("line 5:", 0) == 0);
    }
}

TEST_CASE("malformed documents raise ParseError with the line") {
    CHECK(message_of<ParseError>("grid:\n  nx: 64\n  nx: 32\n").find("line 3") != std::string::npos);
    CHECK(message_of<ParseError>("model:\n  kapa: 1\n").find("line 2") != std::string::npos);
    CHECK(message_of<ParseError>("nope: 1\n").find("line 1") != std::string::npos);
    CHECK(message_of<ParseError>("model:\n  kappa: 2\n").find("line 2") != std::string::npos);
    CHECK(message_of<ParseError>("grid: {nx: 7, ny: 8, lx: 1, ly: 1}\n") != "");
    CHECK(message_of<ParseError>("init:\n  kind: lump\n  beta: 1\n").find("line 3") != std::string::npos);
    CHECK(message_of<ParseError>("init:\n  kind: snapshot_file\n") != "");
    CHECK(message_of<ParseError>("verify: [schedules, nonsense]\n") != "");
    CHECK(message_of<ParseError>("verify: [schedules, schedules]\n") != "");
    CHECK(message_of<ParseError>("model: {t_start: 8, t_end: 7}\n") != "");
    CHECK(message_of<ParseError>("model: {output_every: 0.3, t_end: 8.389056098930650}\n") != "");
    CHECK(message_of<ParseError>("outputs: {snapshot_every: 0.15}\n") != "");
    CHECK(message_of<ParseError>("sweep: {kappa: [1, 0]}\n") != "");
    CHECK(message_of<ParseError>("model: [1, 2\n") != "");
}

TEST_CASE("snapshot round trip is bit identical") {
    const fs::path dir = scratch("snap");
    const Grid g(8, 16, 3.5, 7.25);
    const Field u = Field::sample(g, [](double x, double y) { return std::sin(x) * std::cos(0.3 * y) + 1e-300; });
    write_snapshot((dir / "a.kpf").string(), u, 12.5);
    const Snapshot s = read_snapshot((dir / "a.kpf").string());
    CHECK(s.nx == 8);
    CHECK(s.ny == 16);
    CHECK(s.t == 12.5);
    const Field v = snapshot_field(s, g);
    bool same = true;
    for (std::size_t i = 0; i < u.v.size(); ++i) same = same && std::bit_cast<std::uint64_t>(u.v[i]) == std::bit_cast<std::uint64_t>(v.v[i]);
    CHECK(same);
    write_snapshot((dir / "b.kpf").string(), s);
    CHECK(slurp(dir / "a.kpf") == slurp(dir / "b.kpf"));

    CHECK_THROWS_AS(snapshot_field(s, Grid(8, 16, 3.5, 7.0)), GridMismatch);
    CHECK_THROWS_AS(snapshot_field(s, Grid(16, 16, 3.5, 7.25)), GridMismatch);
}

TEST_CASE("4x4 snapshot layout") {
    const fs::path dir = scratch("layout");
    Snapshot s;
    s.nx = s.ny = 4;
    s.lx = 1;
    s.ly = 2;
    s.t = 3;
    s.values.assign(16, 0.0);
    s.values[1] = 1.0;
    write_snapshot((dir / "s.kpf").string(), s);
    const std::string bytes = slurp(dir / "s.kpf");
    REQUIRE(bytes.size() == 164);
    CHECK(bytes.substr(0, 4) == "KPF1");
    CHECK(bytes[4] == 4);
    CHECK(bytes[8] == 4);
    // f64 1.0 little-endian at the second value: ... 00 f0 3f
    CHECK((unsigned char)bytes[36 + 8 + 7] == 0x3f);
    CHECK((unsigned char)bytes[36 + 8 + 6] == 0xf0);

    std::string bad = bytes;
    bad[3] = '2';
    std::ofstream(dir / "bad.kpf", std::ios::binary) << bad;
    CHECK_THROWS_AS(read_snapshot((dir / "bad.kpf").string()), BadMagic);
    std::ofstream(dir / "short.kpf", std::ios::binary) << bytes.substr(0, 100);
    CHECK_THROWS_AS(read_snapshot((dir / "short.kpf").string()), TruncatedFile);
    std::ofstream(dir / "header.kpf", std::ios::binary) << bytes.substr(0, 20);
    CHECK_THROWS_AS(read_snapshot((dir / "header.kpf").string()), TruncatedFile);
    std::ofstream(dir / "long.kpf", std::ios::binary) << bytes + "x";
    CHECK_THROWS_AS(read_snapshot((dir / "long.kpf").string()), TruncatedFile);
}

TEST_CASE("CSV header and plot script") {
    CHECK(csv_header() ==
          "t,mass,energy,momentum,second_energy,K,J,I,Lx,Ly,Mx,My,mass_omega1,mass_omega2,mass_omega1tilde_v,"
          "mass_omega2tilde_ux");
    const fs::path dir = scratch("plot");
    CHECK_THROWS_AS(plot_script((dir / "absent.csv").string()), MissingCsv);
    std::ofstream(dir / "empty.csv");
    CHECK_THROWS_AS(plot_script((dir / "empty.csv").string()), MissingCsv);
    std::ofstream(dir / "other.csv") << "a,b\n1,2\n";
    CHECK_THROWS_AS(plot_script((dir / "other.csv").string()), MissingCsv);

    std::ofstream(dir / "run.csv") << csv_header() << "\n";
    const std::string a = plot_script((dir / "run.csv").string());
    CHECK(a == plot_script((dir / "run.csv").string()));
    for (const auto& c : csv_columns()) CHECK(a.find("'" + c + "'") != std::string::npos);
    CHECK(a.find("logscale xy") != std::string::npos);
    emit_plot_script((dir / "run.csv").string(), (dir / "run.gp").string());
    CHECK(slurp(dir / "run.gp") == a);
}

TEST_CASE("log-log slope") {
    std::vector<double> t, f;
    for (int i = 1; i <= 20; ++i) {
        t.push_back(i);
        f.push_back(-3.0 * std::pow(i, -1.5));
    }
    CHECK(loglog_slope(t, f, 0) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(loglog_slope(t, f, 5) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(std::isnan(loglog_slope(t, f, 20)));
}

TEST_CASE("zero initial data gives all-zero diagnostics") {
    RunConfig c = parse_config(kSmallRun);
    c.init.amplitude = 0;
    std::ostringstream csv;
    const RunSummary r = simulate(c, csv, "");
    CHECK(r.rows.size() == 3);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == csv_header());
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        while (std::getline(cells, cell, ',')) CHECK(cell == "0");
    }
    CHECK(rows == 3);
}

TEST_CASE("run writes deterministic outputs and a 1-point sweep matches it") {
    RunConfig c = parse_config(kSmallRun);
    c.outputs.snapshot_every = 0.2;
    const fs::path a = scratch("run_a"), b = scratch("run_b"), sw = scratch("sweep1");
    std::ostringstream err;
    REQUIRE(cmd_run(c, a.string(), err) == 0);
    REQUIRE(cmd_run(c, b.string(), err) == 0);
    const std::string csv = slurp(a / "diagnostics.csv");
    CHECK(csv == slurp(b / "diagnostics.csv"));
    CHECK(slurp(a / "metadata.json") == slurp(b / "metadata.json"));
    CHECK(fs::exists(a / "diagnostics.gp"));
    CHECK(fs::exists(a / "snap_000000.kpf"));
    CHECK(fs::exists(a / "snap_000001.kpf"));
    CHECK(!fs::exists(a / "snap_000002.kpf"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    // diag on the last snapshot reproduces the matching CSV row
    std::ostringstream out;
    REQUIRE(cmd_diag(c, (a / "snap_000001.kpf").string(), "", out, err) == 0);
    const std::string diag = out.str();
    const std::string diag_row = diag.substr(diag.find('\n') + 1);
    CHECK(csv.find(diag_row) != std::string::npos);

    c.sweep.b = {c.schedule.b};
    c.sweep.kappa = {c.model.kappa};
    REQUIRE(cmd_sweep(c, sw.string(), err, 1) == 0);
    CHECK(slurp(sw / "run_000.csv") == csv);
    const std::string summary = slurp(sw / "summary.csv");
    CHECK(summary.find("0,0.29999999999999999,2,1.05,1,ok,") != std::string::npos);
}

TEST_CASE("sweep skips invalid points and keeps lexicographic order") {
    RunConfig c = parse_config(kSmallRun);
    c.sweep.r = {2.0, 1.5};
    c.sweep.kappa = {1, -1};
    const fs::path sw = scratch("sweep2");
    std::ostringstream err;
    REQUIRE(cmd_sweep(c, sw.string(), err, 2) == 0);
    std::istringstream in(slurp(sw / "summary.csv"));
    std::string line;
    std::vector<std::string> rows;
    std::getline(in, line);
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("0,0.29999999999999999,1.5,1.05,-1,skipped,", 0) == 0);
    CHECK(rows[1].rfind("1,0.29999999999999999,1.5,1.05,1,skipped,", 0) == 0);
    CHECK(rows[2].rfind("2,0.29999999999999999,2,1.05,-1,ok,", 0) == 0);
    CHECK(rows[3].rfind("3,0.29999999999999999,2,1.05,1,ok,", 0) == 0);
    CHECK(rows[0].find("window_exponents") != std::string::npos);
    CHECK(!fs::exists(sw / "run_000.csv"));
    CHECK(fs::exists(sw / "run_003.csv"));
}

TEST_CASE("diag rejects a snapshot from another grid") {
    const RunConfig c = parse_config(kSmallRun);
    const fs::path dir = scratch("diag");
    write_snapshot((dir / "s.kpf").string(), Field(Grid(16, 16, 40, 40)), 8.0);
    std::ostringstream out, err;
    CHECK(cmd_diag(c, (dir / "s.kpf").string(), "", out, err) == 1);
    CHECK(err.str().find("differs") != std::string::npos);
}

TEST_CASE("verify reports one line per check") {
    RunConfig c = parse_config("verify: [schedules, interpolation_scaling]\n");
    const fs::path dir = scratch("verify");
    std::ostringstream out, err;
    CHECK(cmd_verify(c, dir.string(), out, err) == 0);
    CHECK(out.str() == slurp(dir / "verify.txt"));
    std::istringstream in(out.str());
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(l1.rfind("schedules measured=", 0) == 0);
    CHECK(l1.find(" PASS ") != std::string::npos);
    CHECK(l2.rfind("interpolation_scaling measured=", 0) == 0);
    CHECK(!std::getline(in, l3));
}
