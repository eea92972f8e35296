#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "porocontact/bench_validate.hpp"
#include "porocontact/config.hpp"
#include "porocontact/outputs.hpp"
#include "porocontact/reference_oracle.hpp"

namespace py = pybind11;
using namespace porocontact;

namespace {

MaterialParams make_params(double lambda, double G, double alpha, double M, double c_f, double phi0, double mu_f,
                           std::optional<double> stab_L)
{
    MaterialParams p;
    p.lambda = lambda;
    p.G = G;
    p.alpha = alpha;
    p.M = M;
    p.c_f = c_f;
    p.phi0 = phi0;
    p.mu_f = mu_f;
    p.stab_L = stab_L;
    p.validate();
    return p;
}

py::dict record_to_dict(const IterationRecord& r)
{
    py::dict d;
    d["k"] = r.k;
    d["n"] = r.n;
    d["norm_dsigma"] = r.norm_dsigma;
    d["norm_adp"] = r.norm_adp;
    d["norm_dz"] = r.norm_dz;
    d["norm_eps_du"] = r.norm_eps_du;
    d["norm_div_du"] = r.norm_div_du;
    d["ratio"] = r.ratio;
    d["bound"] = r.bound;
    d["active_set_size"] = r.active_set_size;
    d["composite_lhs"] = r.composite_lhs;
    d["composite_rhs"] = r.composite_rhs;
    return d;
}

py::dict simulate_config(const std::string& text)
{
    const SolverConfig config = parse_config(text);
    const Discretization disc(build_mesh(config), build_params(config), config.mesh.drained);
    SimulationSettings settings;
    settings.dt = config.dt;
    settings.T = config.T;
    settings.options = config.solver;
    SimulationResult result;
    {
        py::gil_scoped_release release;
        result = run_simulation(disc, build_loads(config), settings);
    }
    py::list states, reports, csv;
    for (const auto& s : result.states) {
        py::dict d;
        d["time"] = s.time;
        d["u"] = s.u;
        d["p"] = s.p;
        d["z"] = s.z;
        d["sigma_v"] = s.sigma_v;
        states.append(d);
    }
    for (const auto& rep : result.reports) {
        py::list rows;
        for (const auto& r : rep.rows) rows.append(record_to_dict(r));
        py::dict d;
        d["k"] = rep.k;
        d["converged"] = rep.converged;
        d["stopping_reason"] = rep.stopping_reason;
        d["rows"] = rows;
        reports.append(d);
        csv.append(format_report_csv(rep));
    }
    py::dict out;
    out["states"] = states;
    out["reports"] = reports;
    out["csv"] = csv;
    out["warnings"] = config.warnings;
    out["failure"] = result.failure ? py::object(py::str(*result.failure)) : py::object(py::none());
    return out;
}

py::dict compare_oracle(const std::string& text)
{
    const SolverConfig config = parse_config(text);
    const Discretization disc(build_mesh(config), build_params(config), config.mesh.drained);
    const Loads loads = build_loads(config);
    StateDiscrepancy d;
    int active = 0;
    {
        py::gil_scoped_release release;
        const State start = zero_state(disc);
        const TimeStepResult split = solve_time_step(disc, loads, start, config.dt, config.solver);
        const MonolithicResult mono = monolithic_step(disc, loads, start, config.dt, {config.solver.contact});
        d = compare_states(split.state, mono.state, disc);
        active = split.contact.active_count();
    }
    py::dict out;
    out["p_l2"] = d.p_l2;
    out["u_h1"] = d.u_h1;
    out["z_hdiv"] = d.z_hdiv;
    out["active_set_size"] = active;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Fixed-stress split solver for Biot poroelasticity with frictionless contact";

    m.def("beta",
          [](double lambda, double alpha, double M, double c_f, double phi0) {
              return beta(make_params(lambda, 1.0, alpha, M, c_f, phi0, 1.0, std::nullopt));
          },
          py::arg("lambda_"), py::arg("alpha"), py::arg("M"), py::arg("c_f") = 0.0, py::arg("phi0") = 0.0);
    m.def("contraction_bound",
          [](double lambda, double alpha, double M, double c_f, double phi0) {
              return contraction_bound(make_params(lambda, 1.0, alpha, M, c_f, phi0, 1.0, std::nullopt));
          },
          py::arg("lambda_"), py::arg("alpha"), py::arg("M"), py::arg("c_f") = 0.0, py::arg("phi0") = 0.0);

    m.def("rect_mesh",
          [](int nx, int ny) {
              const Mesh mesh = build_rect_mesh(nx, ny, {}, {});
              py::dict d;
              d["vertices"] = mesh.num_vertices();
              d["triangles"] = mesh.num_triangles();
              d["edges"] = mesh.num_edges();
              d["text"] = write_mesh(mesh);
              return d;
          },
          py::arg("nx"), py::arg("ny"));

    m.def("simulate", &simulate_config, py::arg("config_text"),
          "Runs the configuration given as text; returns states, reports and CSV text per step");
    m.def("compare_oracle", &compare_oracle, py::arg("config_text"),
          "First time step: split scheme against the monolithic solve");

    m.def("manufactured",
          [](const std::string& which, int n, double dt) {
              ManufacturedCase c;
              if (which == "zero") c = ManufacturedCase::Zero;
              else if (which == "linear") c = ManufacturedCase::Linear;
              else if (which == "trig") c = ManufacturedCase::Trigonometric;
              else throw py::value_error("unknown manufactured case '" + which + "'");
              ManufacturedErrors e;
              {
                  py::gil_scoped_release release;
                  e = manufactured_biot(c, n, dt);
              }
              py::dict d;
              d["h"] = e.h;
              d["p_l2"] = e.p_l2;
              d["u_h1"] = e.u_h1;
              d["z_hdiv"] = e.z_hdiv;
              d["split_vs_monolithic"] = e.split_vs_monolithic;
              return d;
          },
          py::arg("case"), py::arg("n"), py::arg("dt") = 1.0);

    m.def("terzaghi_pressure",
          [](double y, double t) { return TerzaghiSetup{}.pressure(y, t); }, py::arg("y"), py::arg("t"),
          "Series pressure of the unit-parameter column");

    m.def("estimate_order",
          [](const std::vector<double>& h, const std::vector<double>& errors) {
              const auto est = estimate_order(h, errors);
              return py::make_tuple(est.order, est.flagged, est.note);
          },
          py::arg("h"), py::arg("errors"));

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<MeshError>(m, "MeshError", PyExc_ValueError);
}
