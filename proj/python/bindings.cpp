#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kpv/checks.hpp"
#include "kpv/cli_io.hpp"
#include "kpv/errors.hpp"
#include "kpv/invariants.hpp"
#include "kpv/lumps.hpp"
#include "kpv/schedules.hpp"
#include "kpv/weights.hpp"

namespace py = pybind11;
using namespace kpv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays are indexed [y, x], matching the row-major field layout.
Field to_field(const Array& a, const Grid& g) {
    if (a.ndim() != 2 || a.shape(0) != g.ny || a.shape(1) != g.nx)
        throw std::invalid_argument("array shape must be (ny, nx) = (" + std::to_string(g.ny) + ", " +
                                    std::to_string(g.nx) + ")");
    Field f(g);
    std::copy(a.data(), a.data() + g.size(), f.v.begin());
    return f;
}

Array to_array(const Field& f) {
    Array a({f.grid.ny, f.grid.nx});
    std::copy(f.v.begin(), f.v.end(), a.mutable_data());
    return a;
}

const WeightProfile& profile() {
    static const WeightProfile w = build_weight_profile();
    return w;
}

py::dict row_dict(const DiagnosticsRow& r) {
    py::dict d;
    d["t"] = r.t;
    d["mass"] = r.conserved.mass;
    d["energy"] = r.conserved.energy;
    d["momentum"] = r.conserved.momentum;
    d["second_energy"] = r.conserved.second_energy;
    d["K"] = r.K;
    d["J"] = r.J;
    d["I"] = r.I;
    d["Lx"] = r.Lx;
    d["Ly"] = r.Ly;
    d["Mx"] = r.Mx;
    d["My"] = r.My;
    d["mass_omega1"] = r.mass_omega1;
    d["mass_omega2"] = r.mass_omega2;
    d["mass_omega1tilde_v"] = r.mass_omega1tilde_v;
    d["mass_omega2tilde_ux"] = r.mass_omega2tilde_ux;
    d["region_outside_box"] = r.region_outside_box;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "KP evolution, conserved quantities and virial diagnostics";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<NonZeroXMean>(m, "NonZeroXMean", PyExc_ValueError);
    py::register_exception<BlowUp>(m, "BlowUp", PyExc_RuntimeError);
    py::register_exception<BadMagic>(m, "BadMagic", PyExc_IOError);
    py::register_exception<TruncatedFile>(m, "TruncatedFile", PyExc_IOError);
    py::register_exception<GridMismatch>(m, "GridMismatch", PyExc_ValueError);

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, int, double, double>(), py::arg("nx"), py::arg("ny"), py::arg("lx"), py::arg("ly"))
        .def_readonly("nx", &Grid::nx)
        .def_readonly("ny", &Grid::ny)
        .def_readonly("lx", &Grid::lx)
        .def_readonly("ly", &Grid::ly)
        .def("coords", [](const Grid& g) {
            py::array_t<double> x(g.nx), y(g.ny);
            for (int i = 0; i < g.nx; ++i) x.mutable_at(i) = g.x(i);
            for (int j = 0; j < g.ny; ++j) y.mutable_at(j) = g.y(j);
            return py::make_tuple(x, y);
        });

    py::class_<ScheduleParams>(m, "ScheduleParams")
        .def(py::init<>())
        .def_readwrite("b", &ScheduleParams::b)
        .def_readwrite("r", &ScheduleParams::r)
        .def_readwrite("q", &ScheduleParams::q)
        .def_readwrite("p", &ScheduleParams::p)
        .def_readwrite("m1", &ScheduleParams::m1)
        .def_readwrite("m2", &ScheduleParams::m2)
        .def_readwrite("l1", &ScheduleParams::l1)
        .def_readwrite("l2", &ScheduleParams::l2)
        .def_readwrite("eps", &ScheduleParams::eps)
        .def_readwrite("eta0", &ScheduleParams::eta0)
        .def_readwrite("t_start", &ScheduleParams::t_start)
        .def("validate", &ScheduleParams::validate);

    m.def("lambda_", &lambda, py::arg("j"), py::arg("t"), py::arg("s"));
    m.def("eta", &eta, py::arg("k"), py::arg("t"), py::arg("s"));
    m.def("theta", &theta, py::arg("t"), py::arg("s"));

    m.def("lump", &lump_Qc, py::arg("x"), py::arg("y"), py::arg("c") = 1.0);
    m.def(
        "lump_field",
        [](const Grid& g, double c, double beta, bool periodic) {
            LumpParams p;
            p.c = c;
            p.beta = beta;
            return to_array(periodic ? periodic_lump_field(g, p) : lump_field(g, p));
        },
        py::arg("grid"), py::arg("c") = 1.0, py::arg("beta") = 0.0, py::arg("periodic") = false);

    m.def(
        "conserved",
        [](const Array& u, const Grid& g, int kappa) {
            const ConservedRecord c = conserved(to_field(u, g), kappa, 0);
            py::dict d;
            d["mass"] = c.mass;
            d["energy"] = c.energy;
            d["momentum"] = c.momentum;
            d["second_energy"] = c.second_energy;
            d["resolution_warning"] = c.resolution_warning;
            return d;
        },
        py::arg("u"), py::arg("grid"), py::arg("kappa"));
    m.def(
        "interpolation_ratio", [](const Array& u, const Grid& g, double p) { return interpolation_ratio(to_field(u, g), p); },
        py::arg("u"), py::arg("grid"), py::arg("p"));

    m.def(
        "evolve",
        [](const Array& u0, const Grid& g, int kappa, double t0, double t1, double output_every, double dt) {
            KpModel model;
            model.kappa = kappa;
            const Field f = to_field(u0, g);
            model.dt = dt_for_cadence(dt > 0 ? dt : suggest_dt(f, model.cfl), output_every);
            Solver solver(g, model);
            solver.set_ceiling_from(f);
            SimState s{t0, f};
            std::vector<SimState> frames;
            {
                py::gil_scoped_release release;
                solver.run(s, t1, output_every, [&](const SimState& x) { frames.push_back(x); });
            }
            py::list out;
            for (const auto& x : frames) out.append(py::make_tuple(x.t, to_array(x.u)));
            return out;
        },
        py::arg("u0"), py::arg("grid"), py::arg("kappa"), py::arg("t0"), py::arg("t1"), py::arg("output_every"),
        py::arg("dt") = 0.0, "Frames (t, u) from t0 to t1; dt = 0 picks a stable step.");

    m.def(
        "diagnostics",
        [](const Array& u, const Grid& g, double t, int kappa, const ScheduleParams& s) {
            return row_dict(diagnostics(to_field(u, g), t, kappa, s, profile()));
        },
        py::arg("u"), py::arg("grid"), py::arg("t"), py::arg("kappa"), py::arg("schedule") = ScheduleParams{});

    m.def("check_names", &check_names);
    m.def(
        "run_check",
        [](const std::string& name) {
            CheckResult r;
            {
                py::gil_scoped_release release;
                r = run_check(name);
            }
            py::dict d;
            d["name"] = r.name;
            d["measured"] = r.measured;
            d["threshold"] = r.threshold;
            d["pass"] = r.pass;
            d["seconds"] = r.seconds;
            d["detail"] = r.detail;
            return d;
        },
        py::arg("name"));

    m.def(
        "validate_config", [](const std::string& text) { parse_config(text); }, py::arg("text"),
        "Raises ParseError or ValidationError for an invalid YAML run configuration.");
    m.def(
        "run",
        [](const std::string& config_path, const std::string& out_dir) {
            const RunConfig cfg = load_config(config_path);
            std::ostringstream err;
            int code;
            {
                py::gil_scoped_release release;
                code = cmd_run(cfg, out_dir, err);
            }
            return py::make_tuple(code, err.str());
        },
        py::arg("config"), py::arg("out"), "Same as `kpsim run`; returns (exit code, messages).");

    m.def(
        "write_snapshot", [](const std::string& path, const Array& u, const Grid& g, double t) {
            write_snapshot(path, to_field(u, g), t);
        },
        py::arg("path"), py::arg("u"), py::arg("grid"), py::arg("t"));
    m.def(
        "read_snapshot",
        [](const std::string& path) {
            const Snapshot s = read_snapshot(path);
            const Grid g(int(s.nx), int(s.ny), s.lx, s.ly);
            Field f(g);
            f.v = s.values;
            return py::make_tuple(g, s.t, to_array(f));
        },
        py::arg("path"), "Returns (grid, t, u).");
}
