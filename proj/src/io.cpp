#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "kpv/cli_io.hpp"
#include "kpv/errors.hpp"

namespace kpv {

namespace {

constexpr char kMagic[4] = {'K', 'P', 'F', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 8 + 8;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const unsigned char* p, int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_le(p, 8)); }

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& s) {
    if (s.values.size() != std::size_t(s.nx) * s.ny) throw std::invalid_argument("snapshot size does not match nx*ny");
    std::string buf(kMagic, 4);
    buf.reserve(kHeaderBytes + 8 * s.values.size());
    put_u32(buf, s.nx);
    put_u32(buf, s.ny);
    put_f64(buf, s.lx);
    put_f64(buf, s.ly);
    put_f64(buf, s.t);
    for (double v : s.values) put_f64(buf, v);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
    out.write(buf.data(), std::streamsize(buf.size()));
}

void write_snapshot(const std::string& path, const Field& u, double t) {
    Snapshot s;
    s.nx = std::uint32_t(u.grid.nx);
    s.ny = std::uint32_t(u.grid.ny);
    s.lx = u.grid.lx;
    s.ly = u.grid.ly;
    s.t = t;
    s.values = u.v;
    write_snapshot(path, s);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
    const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0) throw BadMagic("'" + path + "' is not a KPF1 snapshot");
    if (buf.size() < kHeaderBytes) throw TruncatedFile("'" + path + "' ends inside the header");
    Snapshot s;
    s.nx = std::uint32_t(get_le(p + 4, 4));
    s.ny = std::uint32_t(get_le(p + 8, 4));
    s.lx = get_f64(p + 12);
    s.ly = get_f64(p + 20);
    s.t = get_f64(p + 28);
    const std::size_t n = std::size_t(s.nx) * s.ny;
    if (buf.size() != kHeaderBytes + 8 * n)
        throw TruncatedFile("'" + path + "' holds " + std::to_string(buf.size()) + " bytes, expected " +
                            std::to_string(kHeaderBytes + 8 * n));
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.values[i] = get_f64(p + kHeaderBytes + 8 * i);
    return s;
}

Field snapshot_field(const Snapshot& s, const Grid& g) {
    if (int(s.nx) != g.nx || int(s.ny) != g.ny || s.lx != g.lx || s.ly != g.ly) {
        std::ostringstream os;
        os << "snapshot grid " << s.nx << "x" << s.ny << " on " << s.lx << "x" << s.ly << " differs from run grid "
           << g.nx << "x" << g.ny << " on " << g.lx << "x" << g.ly;
        throw GridMismatch(os.str());
    }
    Field u(g);
    u.v = s.values;
    return u;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> c = {
        "t",  "mass", "energy", "momentum", "second_energy", "K",           "J",           "I",
        "Lx", "Ly",   "Mx",     "My",       "mass_omega1",   "mass_omega2", "mass_omega1tilde_v",
        "mass_omega2tilde_ux"};
    return c;
}

std::string csv_header() {
    std::string h;
    for (const auto& c : csv_columns()) h += (h.empty() ? "" : ",") + c;
    return h;
}

std::string csv_row(const DiagnosticsRow& r) {
    const double v[] = {r.t,  r.conserved.mass, r.conserved.energy, r.conserved.momentum, r.conserved.second_energy,
                        r.K,  r.J,              r.I,                r.Lx,                 r.Ly,
                        r.Mx, r.My,             r.mass_omega1,      r.mass_omega2,        r.mass_omega1tilde_v,
                        r.mass_omega2tilde_ux};
    std::string out;
    char buf[32];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        if (!out.empty()) out += ',';
        out += buf;
    }
    return out;
}

std::string plot_script(const std::string& csv_path) {
    std::ifstream in(csv_path);
    std::string header;
    if (!in || !std::getline(in, header) || header.empty()) throw MissingCsv("no CSV data at '" + csv_path + "'");
    if (header != csv_header()) throw MissingCsv("'" + csv_path + "' does not carry the diagnostics header");
    std::string stem = csv_path;
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos)
        stem.erase(dot);

    std::ostringstream s;
    s << "# gnuplot script for " << csv_path << "\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set terminal pngcairo size 1000,700\n"
      << "csv = '" << csv_path << "'\n"
      << "stats csv using 'mass' every ::0::0 nooutput\nm0 = STATS_min\n"
      << "stats csv using 'energy' every ::0::0 nooutput\ne0 = STATS_min\n"
      << "stats csv using 'momentum' every ::0::0 nooutput\np0 = STATS_min\n"
      << "stats csv using 'second_energy' every ::0::0 nooutput\nf0 = STATS_min\n"
      << "rel(x, x0) = abs(x0) > 0 ? abs(x - x0) / abs(x0) : abs(x - x0)\n"
      << "\n"
      << "set output '" << stem << "_drifts.png'\n"
      << "set title 'conserved quantity drift'\nset xlabel 't'\nset ylabel 'relative drift'\nset logscale y\n"
      << "plot csv using 't':(rel(column('mass'), m0)) with lines title 'mass', \\\n"
      << "     csv using 't':(rel(column('energy'), e0)) with lines title 'energy', \\\n"
      << "     csv using 't':(abs(column('momentum') - p0)) with lines title 'momentum (absolute)', \\\n"
      << "     csv using 't':(rel(column('second_energy'), f0)) with lines title 'second_energy'\n"
      << "\n"
      << "set output '" << stem << "_virials.png'\n"
      << "set title 'virial functionals'\nset ylabel '|value|'\nset logscale xy\n"
      << "plot";
    const char* virials[] = {"K", "J", "I", "Lx", "Ly", "Mx", "My"};
    for (const char* c : virials)
        s << (c == virials[0] ? " " : ", \\\n     ") << "csv using 't':(abs(column('" << c
          << "'))) with lines title '" << c << "'";
    s << "\n\n"
      << "set output '" << stem << "_regions.png'\n"
      << "set title 'region masses'\nset ylabel 'mass'\nunset logscale\nset logscale y\n"
      << "plot";
    const char* regions[] = {"mass_omega1", "mass_omega2", "mass_omega1tilde_v", "mass_omega2tilde_ux"};
    for (const char* c : regions)
        s << (c == regions[0] ? " " : ", \\\n     ") << "csv using 't':'" << c << "' with lines title '" << c << "'";
    s << "\n";
    return s.str();
}

void emit_plot_script(const std::string& csv_path, const std::string& script_path) {
    const std::string text = plot_script(csv_path);
    std::ofstream out(script_path);
    if (!out) throw std::runtime_error("cannot write '" + script_path + "'");
    out << text;
}

}  // namespace kpv
