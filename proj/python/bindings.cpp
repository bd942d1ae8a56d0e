#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "phasefield/app.hpp"
#include "phasefield/error.hpp"
#include "phasefield/mesh.hpp"
#include "phasefield/physics.hpp"
#include "phasefield/schemes.hpp"

namespace py = pybind11;
using namespace phasefield;

namespace {

py::dict record_to_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["step"] = r.step;
  d["time"] = r.time;
  d["mass"] = r.mass;
  d["E_total"] = r.e_total;
  d["E_interf"] = r.e_interf;
  d["E_bulk"] = r.e_bulk;
  d["E_kin"] = r.e_kin;
  d["diss_mob"] = r.diss_mob;
  d["diss_alpha"] = r.diss_alpha;
  d["diss_visc"] = r.diss_visc;
  d["balance_res"] = r.balance_res;
  d["Lx"] = r.lx;
  d["Ly"] = r.ly;
  d["P"] = r.angular;
  d["div_norm"] = r.div_norm;
  d["newton_iters"] = r.newton_iters;
  d["newton_res"] = r.newton_res;
  return d;
}

struct RunOutput {
  std::vector<DiagnosticsRecord> records;
  std::vector<double> phi;
  std::vector<double> velocity;
};

RunOutput simulate(const RunConfig& config) {
  config.scheme.validate();
  Stepper stepper(config.scheme);
  const Discretization& disc = stepper.discretization();
  const SchemeState s0 = stepper.initial_state(initial_phi(config.scheme.seed, disc.scalar_space()));
  RunOutput out;
  RunSinks sinks;
  sinks.diagnostics = [&](const DiagnosticsRecord& r) { out.records.push_back(r); };
  const SchemeState last = run(stepper, s0, sinks);
  out.phi = last.phi.coefficients;
  out.velocity = last.velocity.coefficients;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Structure-preserving finite element solver for CH, CHD and CHNS on the periodic unit square.";

  static py::exception<Error> base(m, "Error");
  py::register_exception<InvalidMeshSize>(m, "InvalidMeshSize", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", base.ptr());
  py::register_exception<StepFailure>(m, "StepFailure", base.ptr());

  py::class_<Mesh>(m, "Mesh")
      .def_static("periodic_unit_square", &Mesh::periodic_unit_square, py::arg("n"))
      .def_property_readonly("n", &Mesh::n)
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_edges", &Mesh::num_edges)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_property_readonly("h_max", &Mesh::h_max)
      .def("vertices", [](const Mesh& mesh) {
        std::vector<std::pair<double, double>> v;
        for (const Point& p : mesh.vertices()) v.emplace_back(p.x, p.y);
        return v;
      })
      .def("triangles", [](const Mesh& mesh) {
        std::vector<std::array<int, 3>> t;
        for (std::size_t i = 0; i < mesh.num_triangles(); ++i) t.push_back(mesh.triangle(i));
        return t;
      })
      .def("area", [](const Mesh& mesh, std::size_t t) { return mesh.geometry(t).area; }, py::arg("t"));

  py::class_<MaterialLaws>(m, "MaterialLaws")
      .def(py::init<>())
      .def_readwrite("gamma", &MaterialLaws::gamma)
      .def_readwrite("mobility_scale", &MaterialLaws::mobility_scale)
      .def_readwrite("mobility_floor", &MaterialLaws::mobility_floor)
      .def_readwrite("alpha0", &MaterialLaws::alpha0)
      .def_readwrite("alpha1", &MaterialLaws::alpha1)
      .def_readwrite("eta0", &MaterialLaws::eta0)
      .def_readwrite("eta1", &MaterialLaws::eta1);

  m.def("double_well", &double_well, py::arg("phi"));
  m.def("double_well_prime", &double_well_prime, py::arg("phi"));
  m.def("dg_potential", &dg_potential, py::arg("a"), py::arg("b"));
  m.def("dg_potential_db", &dg_potential_db, py::arg("a"), py::arg("b"));
  m.def("mobility", &mobility, py::arg("laws"), py::arg("phi"));
  m.def("alpha", &alpha, py::arg("laws"), py::arg("phi"));
  m.def("eta", &eta, py::arg("laws"), py::arg("phi"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_property(
          "scheme", [](const RunConfig& c) { return to_string(c.scheme.scheme); },
          [](RunConfig& c, const std::string& s) { c.scheme.scheme = parse_scheme(s); })
      .def_property(
          "n", [](const RunConfig& c) { return c.scheme.n; }, [](RunConfig& c, int n) { c.scheme.n = n; })
      .def_property(
          "tau", [](const RunConfig& c) { return c.scheme.tau; }, [](RunConfig& c, double v) { c.scheme.tau = v; })
      .def_property(
          "T", [](const RunConfig& c) { return c.scheme.final_time; },
          [](RunConfig& c, double v) { c.scheme.final_time = v; })
      .def_property(
          "seed", [](const RunConfig& c) { return c.scheme.seed; },
          [](RunConfig& c, std::uint64_t v) { c.scheme.seed = v; })
      .def_property(
          "darcy_order", [](const RunConfig& c) { return c.scheme.darcy_order; },
          [](RunConfig& c, int v) { c.scheme.darcy_order = v; })
      .def_property(
          "laws", [](const RunConfig& c) { return c.scheme.laws; },
          [](RunConfig& c, const MaterialLaws& l) { c.scheme.laws = l; })
      .def_property_readonly("num_steps", [](const RunConfig& c) { return c.scheme.num_steps(); })
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("stride", &RunConfig::stride)
      .def("to_text", &serialize_config);

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("preset_config", [](const std::string& s) { return preset_config(parse_scheme(s)); }, py::arg("scheme"));

  m.def("splitmix64", &splitmix64, py::arg("x"));
  m.def(
      "initial_phi",
      [](std::uint64_t seed, int n) {
        const auto mesh = std::make_shared<const Mesh>(Mesh::periodic_unit_square(n));
        return initial_phi(seed, DofMap::build(mesh, SpaceKind::P1C)).coefficients;
      },
      py::arg("seed"), py::arg("n"));

  m.attr("CSV_HEADER") = kCsvHeader;

  m.def(
      "run",
      [](const RunConfig& config) {
        RunOutput out;
        {
          py::gil_scoped_release release;
          out = simulate(config);
        }
        py::list records;
        for (const auto& r : out.records) records.append(record_to_dict(r));
        py::dict result;
        result["records"] = records;
        result["phi"] = out.phi;
        result["velocity"] = out.velocity;
        return result;
      },
      py::arg("config"),
      "Runs the configured scheme from the seeded initial data. Returns the per-step diagnostics and the final fields.");

  m.def(
      "check",
      []() {
        std::ostringstream out;
        const bool ok = run_checks(out);
        return py::make_tuple(ok, out.str());
      },
      "Invariant self-check on tiny meshes. Returns (passed, report).");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli_main(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process. Returns (exit_code, stdout, stderr).");
}
