#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>

#include "phasefield/app.hpp"
#include "phasefield/error.hpp"

namespace phasefield {

namespace {

struct CheckResult {
  bool ok = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

CheckResult check_mesh() {
  for (int n = 2; n <= 8; ++n) {
    const Mesh m = Mesh::periodic_unit_square(n);
    const auto nn = static_cast<std::size_t>(n) * n;
    if (m.num_vertices() != nn || m.num_edges() != 3 * nn || m.num_triangles() != 2 * nn) {
      return {false, "entity counts wrong for n=" + std::to_string(n)};
    }
    std::vector<int> uses(m.num_edges(), 0), circulation(m.num_edges(), 0);
    double area = 0.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const double a = m.geometry(t).area;
      if (!(a > 0.0)) return {false, "non-positive area"};
      area += a;
      for (int k = 0; k < 3; ++k) {
        ++uses[m.triangle_edges(t)[k]];
        circulation[m.triangle_edges(t)[k]] += m.triangle_edge_signs(t)[k];
      }
    }
    if (std::abs(area - 1.0) > 1e-14) return {false, "total area " + sci(area)};
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      if (uses[e] != 2 || circulation[e] != 0) return {false, "edge incidence broken"};
    }
  }
  return {true, "n=2..8"};
}

CheckResult check_partition_of_unity() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 20; ++i) {
    double x = u(rng), y = u(rng);
    if (x + y > 1.0) {
      x = 1.0 - x;
      y = 1.0 - y;
    }
    pts.push_back({x, y});
  }
  double worst = 0.0;
  for (SpaceKind kind : {SpaceKind::P1C, SpaceKind::P2C}) {
    const Tabulation tab = tabulate_reference(kind, pts);
    for (int q = 0; q < tab.num_points; ++q) {
      double s = 0.0;
      for (int i = 0; i < tab.num_dofs; ++i) s += tab.value(q, i);
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return {worst <= 1e-14, "max defect " + sci(worst)};
}

// Normal trace of a random RT field seen from both sides of every edge.
CheckResult check_rt_continuity() {
  auto mesh = std::make_shared<const Mesh>(Mesh::periodic_unit_square(3));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (SpaceKind kind : {SpaceKind::RT0, SpaceKind::RT1}) {
    auto space = DofMap::build(mesh, kind);
    FieldVector f(space);
    for (double& c : f.coefficients) c = u(rng);
    std::vector<std::vector<double>> trace(mesh->num_edges());
    for (std::size_t t = 0; t < mesh->num_triangles(); ++t) {
      const TriangleGeometry geo = mesh->geometry(t);
      for (int k = 0; k < 3; ++k) {
        const int e = mesh->triangle_edges(t)[k];
        const int sign = mesh->triangle_edge_signs(t)[k];
        const Point a = geo.corners[(k + 1) % 3], b = geo.corners[(k + 2) % 3];
        // Global normal: global tangent rotated clockwise.
        const double tx = sign * (b.x - a.x), ty = sign * (b.y - a.y);
        std::vector<Point> pts;
        for (double s : {0.1, 0.5, 0.8}) {
          const double sl = sign > 0 ? s : 1.0 - s;
          const Point ref[3] = {{0, 0}, {1, 0}, {0, 1}};
          const Point ra = ref[(k + 1) % 3], rb = ref[(k + 2) % 3];
          pts.push_back({ra.x + sl * (rb.x - ra.x), ra.y + sl * (rb.y - ra.y)});
        }
        const auto vals = evaluate(f, t, pts);
        std::vector<double> normal;
        for (const auto& v : vals) normal.push_back(v[0] * ty - v[1] * tx);
        if (trace[e].empty()) {
          trace[e] = normal;
        } else {
          for (std::size_t i = 0; i < normal.size(); ++i) {
            worst = std::max(worst, std::abs(normal[i] - trace[e][i]));
          }
        }
      }
    }
  }
  return {worst <= 1e-13, "max jump " + sci(worst)};
}

CheckResult check_secant() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = u(rng);
    const double fa = double_well(a), fb = double_well(b);
    worst = std::max(worst, std::abs(dg_potential(a, b) * (b - a) - (fb - fa)) / (1 + std::abs(fa) + std::abs(fb)));
  }
  return {worst <= 1e-14, "max scaled defect " + sci(worst)};
}

struct TinyProblem {
  std::shared_ptr<const Discretization> disc;
  std::vector<double> x, phi_old, v_old;
};

TinyProblem random_problem(SchemeKind scheme, int n, unsigned seed) {
  TinyProblem p;
  p.disc = std::make_shared<const Discretization>(
      std::make_shared<const Mesh>(Mesh::periodic_unit_square(n)), scheme, 0, 6);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const BlockLayout& layout = p.disc->layout();
  p.x.resize(layout.total);
  for (double& v : p.x) v = 0.1 * u(rng);
  for (int i = 0; i < layout.num_scalar; ++i) p.x[layout.phi + i] = 0.4 + 0.2 * u(rng);
  p.phi_old.resize(layout.num_scalar);
  for (double& v : p.phi_old) v = 0.4 + 0.2 * u(rng);
  p.v_old.resize(layout.num_velocity);
  for (double& v : p.v_old) v = 0.1 * u(rng);
  return p;
}

CheckResult check_jacobian(SchemeKind scheme) {
  const MaterialLaws laws;
  TinyProblem p = random_problem(scheme, 2, 5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> d(p.x.size());
  for (double& v : d) v = u(rng);
  const double tau = 1e-3, eps = 1e-6;
  const FormContext ctx{*p.disc, laws, tau, p.x, p.phi_old, p.v_old};
  const std::vector<double> jd = assemble_jacobian(ctx).matvec(d);
  std::vector<double> xp = p.x, xm = p.x;
  for (std::size_t i = 0; i < d.size(); ++i) {
    xp[i] += eps * d[i];
    xm[i] -= eps * d[i];
  }
  const auto rp = assemble_residual({*p.disc, laws, tau, xp, p.phi_old, p.v_old});
  const auto rm = assemble_residual({*p.disc, laws, tau, xm, p.phi_old, p.v_old});
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double fd = (rp[i] - rm[i]) / (2 * eps);
    diff = std::max(diff, std::abs(fd - jd[i]));
    scale = std::max(scale, std::abs(jd[i]));
  }
  const double rel = diff / scale;
  return {rel <= 1e-6, "relative defect " + sci(rel)};
}

CheckResult check_step(SchemeKind scheme, bool constant) {
  SchemeConfig config;
  config.scheme = scheme;
  config.n = 4;
  config.final_time = config.tau;
  Stepper stepper(config);
  const Discretization& disc = stepper.discretization();
  FieldVector phi0 = constant ? FieldVector(disc.scalar_space(),
                                            std::vector<double>(disc.scalar_space()->num_dofs(), 0.4))
                              : initial_phi(42, disc.scalar_space());
  const SchemeState s0 = stepper.initial_state(phi0);
  const auto [s1, report] = stepper.step(s0);
  if (constant) {
    double change = 0.0;
    for (std::size_t i = 0; i < s1.phi.size(); ++i) {
      change = std::max(change, std::abs(s1.phi.coefficients[i] - s0.phi.coefficients[i]));
    }
    if (s1.has_velocity()) change = std::max(change, norm_inf(s1.velocity.coefficients));
    return {change <= 1e-13, "max change " + sci(change)};
  }
  const double drift = std::abs(mass(disc, s1.phi) - mass(disc, s0.phi));
  const double balance = balance_residual(disc, config.laws, config.tau, s0, s1);
  return {drift <= 1e-13 && balance <= 1e-9,
          "mass drift " + sci(drift) + ", balance residual " + sci(balance)};
}

}  // namespace

bool run_checks(std::ostream& out) {
  std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"mesh-invariants", check_mesh},
      {"partition-of-unity", check_partition_of_unity},
      {"rt-normal-continuity", check_rt_continuity},
      {"secant-property", check_secant},
  };
  for (SchemeKind s : {SchemeKind::CH, SchemeKind::CHD, SchemeKind::CHNS}) {
    checks.emplace_back("jacobian-fd-" + to_string(s), [s] { return check_jacobian(s); });
    checks.emplace_back("fixed-point-" + to_string(s), [s] { return check_step(s, true); });
    checks.emplace_back("step-balance-" + to_string(s), [s] { return check_step(s, false); });
  }
  bool all = true;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    all = all && r.ok;
    out << (r.ok ? "PASS " : "FAIL ") << name << " (" << r.detail << ")\n";
  }
  return all;
}

namespace {

void report_error(std::ostream& err, const char* kind, const std::string& what) {
  std::string line = what;
  std::replace(line.begin(), line.end(), '\n', ' ');
  err << "error: " << kind << ": " << line << '\n';
}

struct RunSummary {
  double final_energy = 0.0;
  double mass_drift = 0.0;
  double max_balance = 0.0;
  double max_div = 0.0;
  int steps = 0;
};

RunSummary execute_run(const RunConfig& config, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + ec.message(), dir.string());

  const fs::path csv_path = dir / "diagnostics.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot open file for writing", csv_path.string());
  write_csv_header(csv);

  Stepper stepper(config.scheme);
  const Discretization& disc = stepper.discretization();
  const SchemeState initial =
      stepper.initial_state(initial_phi(config.scheme.seed, disc.scalar_space()));
  const double mass0 = mass(disc, initial.phi);

  RunSummary summary;
  RunSinks sinks;
  sinks.diagnostics = [&](const DiagnosticsRecord& r) {
    write_csv_row(r, csv);
    if (!csv) throw IoError("write failed", csv_path.string());
    summary.final_energy = r.e_total;
    summary.mass_drift = std::max(summary.mass_drift, std::abs(r.mass - mass0));
    summary.max_balance = std::max(summary.max_balance, r.balance_res);
    summary.max_div = std::max(summary.max_div, r.div_norm);
    summary.steps = r.step;
  };
  sinks.field_stride = config.stride;
  sinks.fields = [&](const SchemeState& s) {
    char name[32];
    std::snprintf(name, sizeof name, "fields_%06d.vtk", s.step);
    write_vtk(dir / name, disc, s);
  };
  try {
    run(stepper, initial, sinks);
  } catch (const StepFailure& failure) {
    write_vtk(dir / "failure.vtk", disc, failure.state());
    throw;
  }
  out << "steps=" << summary.steps << " final_energy=" << sci(summary.final_energy)
      << " mass_drift=" << sci(summary.mass_drift)
      << " max_balance_residual=" << sci(summary.max_balance)
      << " max_div_norm=" << sci(summary.max_div) << '\n';
  return summary;
}

}  // namespace

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-preserving phase-field solver (CH, CHD, CHNS)", "phasefield"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run a simulation from a config file");
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  run_cmd->add_option("--config", config_path, "key=value config file")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override the config seed");
  auto* out_opt = run_cmd->add_option("--out", out_dir, "override the output directory");

  auto* check_cmd = app.add_subcommand("check", "Run the invariant self-check on tiny meshes");

  auto* preset_cmd = app.add_subcommand("preset", "Print the experiment config of a scheme");
  std::string preset_name;
  preset_cmd->add_option("scheme", preset_name, "ch, chd or chns")
      ->required()
      ->check(CLI::IsMember({"ch", "chd", "chns"}));

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("phasefield");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    err << app.help();
    return 2;
  }

  try {
    if (*preset_cmd) {
      out << serialize_config(preset_config(parse_scheme(preset_name)));
      return 0;
    }
    if (*check_cmd) {
      return run_checks(out) ? 0 : 1;
    }
    if (*run_cmd) {
      RunConfig config = load_config(config_path);
      if (*seed_opt) config.scheme.seed = seed;
      if (const char* env = std::getenv("PHASEFIELD_OUT"); env && *env) config.output_dir = env;
      if (*out_opt) config.output_dir = out_dir;
      execute_run(config, out);
      return 0;
    }
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error(err, "error", e.what());
    return 1;
  }
  return 2;
}

}  // namespace phasefield
