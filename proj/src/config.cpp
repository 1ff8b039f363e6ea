#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kpv/checks.hpp"
#include "kpv/cli_io.hpp"
#include "kpv/errors.hpp"

namespace kpv {

const char* init_kind_name(InitKind k) {
    switch (k) {
        case InitKind::Lump: return "lump";
        case InitKind::MovingLump: return "moving_lump";
        case InitKind::GaussianXDerivative: return "gaussian_x_derivative";
        case InitKind::LineSoliton: return "line_soliton";
        case InitKind::SnapshotFile: return "snapshot_file";
    }
    return "?";
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ParseError(line_of(n), msg); }

// Mapping with every key checked against an allowed set and for duplicates.
class Section {
public:
    Section(const YAML::Node& node, const std::string& name, std::set<std::string> allowed)
        : node_(node), name_(name) {
        if (!node.IsMap()) fail(node, "'" + name + "' must be a mapping");
        for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string key = it->first.as<std::string>();
            if (!allowed.count(key)) fail(it->first, "unknown key '" + key + "' in '" + name + "'");
            if (entries_.count(key)) fail(it->first, "duplicate key '" + key + "' in '" + name + "'");
            entries_.emplace(key, std::make_pair(it->first, it->second));
        }
    }

    bool has(const std::string& k) const { return entries_.count(k) > 0; }
    const YAML::Node& value(const std::string& k) const { return entries_.at(k).second; }
    int key_line(const std::string& k) const { return line_of(entries_.at(k).first); }
    int line() const { return line_of(node_); }
    const std::string& name() const { return name_; }
    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        for (const auto& kv : entries_) out.push_back(kv.first);
        return out;
    }

    template <class T>
    void get(const std::string& k, T& out, const char* what) const {
        if (!has(k)) return;
        const YAML::Node& v = value(k);
        if (!v.IsScalar()) fail(v, "'" + name_ + "." + k + "' must be " + what);
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            fail(v, "'" + name_ + "." + k + "' must be " + what + ", got '" + v.Scalar() + "'");
        }
    }
    void number(const std::string& k, double& out) const {
        get(k, out, "a number");
        if (has(k) && !std::isfinite(out)) fail(value(k), "'" + name_ + "." + k + "' must be finite");
    }
    void positive(const std::string& k, double& out) const {
        number(k, out);
        if (has(k) && !(out > 0)) fail(value(k), "'" + name_ + "." + k + "' must be positive");
    }

private:
    YAML::Node node_;
    std::string name_;
    std::map<std::string, std::pair<YAML::Node, YAML::Node>> entries_;
};

template <class T>
std::vector<T> number_list(const Section& s, const std::string& k) {
    std::vector<T> out;
    if (!s.has(k)) return out;
    const YAML::Node& v = s.value(k);
    if (!v.IsSequence() || v.size() == 0) fail(v, "'" + s.name() + "." + k + "' must be a non-empty list");
    for (const auto& item : v) {
        try {
            out.push_back(item.as<T>());
        } catch (const YAML::Exception&) {
            fail(item, "'" + s.name() + "." + k + "' entries must be numbers");
        }
    }
    return out;
}

void parse_model(const Section& s, RunConfig& c) {
    if (s.has("kappa")) {
        int k = 0;
        s.get("kappa", k, "-1 or 1");
        if (k != -1 && k != 1) fail(s.value("kappa"), "'model.kappa' must be -1 or 1");
        c.model.kappa = k;
    }
    if (s.has("dt")) {
        const YAML::Node& v = s.value("dt");
        if (v.IsScalar() && v.Scalar() == "auto")
            c.model.dt = 0;
        else
            s.positive("dt", c.model.dt);
    }
    s.positive("cfl", c.model.cfl);
    s.positive("blowup_factor", c.model.blowup_factor);
    s.get("dealias", c.model.dealias_on, "true or false");
    s.get("nonlinear", c.model.nonlinear_on, "true or false");
    s.number("t_start", c.t_start);
    const bool has_end = s.has("t_end");
    if (has_end)
        s.number("t_end", c.t_end);
    else
        c.t_end = c.t_start + 4;
    s.positive("output_every", c.output_every);
    const int end_line = has_end ? s.key_line("t_end") : s.line();
    if (!(c.t_end > c.t_start)) throw ParseError(end_line, "'model.t_end' must exceed t_start");
    const double ticks = (c.t_end - c.t_start) / c.output_every;
    if (std::abs(ticks - std::round(ticks)) > 1e-9 * std::max(1.0, ticks))
        throw ParseError(end_line, "t_end - t_start must be a whole number of output_every intervals");
}

void parse_grid(const Section& s, RunConfig& c) {
    int nx = c.grid.nx, ny = c.grid.ny;
    double lx = c.grid.lx, ly = c.grid.ly;
    s.get("nx", nx, "an integer");
    s.get("ny", ny, "an integer");
    s.positive("lx", lx);
    s.positive("ly", ly);
    try {
        c.grid = Grid(nx, ny, lx, ly);
    } catch (const std::invalid_argument& e) {
        throw ParseError(s.line(), e.what());
    }
}

const std::map<std::string, std::vector<std::string>>& constraint_keys() {
    static const std::map<std::string, std::vector<std::string>> m = {
        {"window_exponents", {"r", "b"}}, {"smoothing_exponent", {"q", "b"}}, {"time_exponent", {"p", "b"}},
        {"shift_exponents", {"m1", "m2", "b"}}, {"log_exponent", {"eps"}}, {"region_margin", {"eta0"}},
        {"start_time", {}},
    };
    return m;
}

// t_start_line locates model.t_start, which the start_time constraint is about.
void validate_schedule(const ScheduleParams& p, const Section* s, int t_start_line) {
    try {
        p.validate();
    } catch (const ValidationError& e) {
        int line = t_start_line;
        if (s && e.constraint != "start_time") {
            line = s->line();
            for (const auto& k : constraint_keys().at(e.constraint))
                if (s->has(k)) {
                    line = s->key_line(k);
                    break;
                }
        }
        throw ValidationError(e.constraint, "line " + std::to_string(line) + ": " +
                                                std::string(e.what()).substr(0, std::string(e.what()).rfind(" [")));
    }
}

void parse_schedule(const Section& s, RunConfig& c) {
    ScheduleParams& p = c.schedule;
    const std::pair<const char*, double*> fields[] = {{"b", &p.b},   {"r", &p.r},   {"q", &p.q},
                                                      {"m1", &p.m1}, {"m2", &p.m2}, {"l1", &p.l1},
                                                      {"l2", &p.l2}, {"eps", &p.eps}, {"eta0", &p.eta0}};
    for (const auto& [k, slot] : fields) s.number(k, *slot);
    // p follows b unless given.
    p.p = 1 - p.b;
    s.number("p", p.p);
}

const std::map<std::string, InitKind>& kinds() {
    static const std::map<std::string, InitKind> m = {
        {"lump", InitKind::Lump},
        {"moving_lump", InitKind::MovingLump},
        {"gaussian_x_derivative", InitKind::GaussianXDerivative},
        {"line_soliton", InitKind::LineSoliton},
        {"snapshot_file", InitKind::SnapshotFile},
    };
    return m;
}

void parse_init(const Section& s, RunConfig& c) {
    InitConfig& in = c.init;
    if (s.has("kind")) {
        std::string k;
        s.get("kind", k, "a kind name");
        const auto it = kinds().find(k);
        if (it == kinds().end()) fail(s.value("kind"), "unknown init kind '" + k + "'");
        in.kind = it->second;
    }
    std::set<std::string> allowed = {"kind"};
    switch (in.kind) {
        case InitKind::Lump: allowed.insert({"c", "x0", "y0", "periodic"}); break;
        case InitKind::MovingLump: allowed.insert({"c", "beta", "x0", "y0", "periodic"}); break;
        case InitKind::GaussianXDerivative: allowed.insert({"amplitude", "sigma", "x0", "y0"}); break;
        case InitKind::LineSoliton: allowed.insert({"c", "x0"}); break;
        case InitKind::SnapshotFile: allowed.insert({"path"}); break;
    }
    for (const auto& k : s.keys())
        if (!allowed.count(k))
            throw ParseError(s.key_line(k),
                             "key '" + k + "' does not apply to init kind " + init_kind_name(in.kind));
    s.positive("c", in.c);
    s.number("beta", in.beta);
    s.number("x0", in.x0);
    s.number("y0", in.y0);
    s.number("amplitude", in.amplitude);
    s.positive("sigma", in.sigma);
    s.get("periodic", in.periodic, "true or false");
    s.get("path", in.path, "a file path");
    if (in.kind == InitKind::SnapshotFile && in.path.empty())
        throw ParseError(s.line(), "init kind snapshot_file needs 'path'");
}

void parse_outputs(const Section& s, RunConfig& c) {
    s.get("csv", c.outputs.csv, "a file name");
    s.number("snapshot_every", c.outputs.snapshot_every);
    s.get("plot_script", c.outputs.plot_script, "true or false");
    const double se = c.outputs.snapshot_every;
    if (se < 0) fail(s.value("snapshot_every"), "'outputs.snapshot_every' must be >= 0");
    if (se > 0) {
        const double k = se / c.output_every;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k) || std::round(k) < 1)
            fail(s.value("snapshot_every"), "'outputs.snapshot_every' must be a multiple of model.output_every");
    }
}

void parse_verify(const YAML::Node& n, RunConfig& c) {
    if (!n.IsSequence()) fail(n, "'verify' must be a list of check names");
    std::set<std::string> seen;
    for (const auto& item : n) {
        const std::string name = item.as<std::string>();
        const auto& names = check_names();
        if (std::find(names.begin(), names.end(), name) == names.end()) fail(item, "unknown check '" + name + "'");
        if (!seen.insert(name).second) fail(item, "check '" + name + "' listed twice");
        c.verify.push_back(name);
    }
}

void parse_sweep(const Section& s, RunConfig& c) {
    c.sweep.b = number_list<double>(s, "b");
    c.sweep.r = number_list<double>(s, "r");
    c.sweep.q = number_list<double>(s, "q");
    c.sweep.kappa = number_list<int>(s, "kappa");
    for (int k : c.sweep.kappa)
        if (k != -1 && k != 1) fail(s.value("kappa"), "'sweep.kappa' entries must be -1 or 1");
    s.number("fit_from", c.sweep.fit_from);
    if (s.has("fit_from") && !(c.sweep.fit_from >= 0 && c.sweep.fit_from < 1))
        fail(s.value("fit_from"), "'sweep.fit_from' must lie in [0, 1)");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.mark.line + 1, e.msg);
    }
    RunConfig c;
    if (root.IsNull()) {
        validate_schedule(c.schedule, nullptr, 1);
        return c;
    }
    const Section top(root, "document", {"model", "grid", "schedule", "init", "outputs", "verify", "sweep"});

    // Model first: t_start feeds the schedule and output cadence feeds snapshots.
    if (top.has("model"))
        parse_model(Section(top.value("model"), "model",
                            {"kappa", "dt", "cfl", "t_start", "t_end", "output_every", "dealias", "nonlinear",
                             "blowup_factor"}),
                    c);
    int t_start_line = 1;
    if (top.has("model")) {
        const YAML::Node& m = top.value("model");
        t_start_line = m.IsMap() && m["t_start"] ? line_of(m["t_start"]) : line_of(m);
    }
    if (top.has("grid")) parse_grid(Section(top.value("grid"), "grid", {"nx", "ny", "lx", "ly"}), c);
    c.schedule.t_start = c.t_start;
    if (top.has("schedule")) {
        const Section s(top.value("schedule"), "schedule",
                        {"b", "r", "q", "p", "m1", "m2", "l1", "l2", "eps", "eta0"});
        parse_schedule(s, c);
        validate_schedule(c.schedule, &s, t_start_line);
    } else {
        validate_schedule(c.schedule, nullptr, t_start_line);
    }
    if (top.has("init"))
        parse_init(Section(top.value("init"), "init",
                           {"kind", "c", "beta", "x0", "y0", "amplitude", "sigma", "periodic", "path"}),
                   c);
    if (top.has("outputs"))
        parse_outputs(Section(top.value("outputs"), "outputs", {"csv", "snapshot_every", "plot_script"}), c);
    if (top.has("verify")) parse_verify(top.value("verify"), c);
    if (top.has("sweep")) parse_sweep(Section(top.value("sweep"), "sweep", {"b", "r", "q", "kappa", "fit_from"}), c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace kpv
