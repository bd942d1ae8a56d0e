#include "phasefield/app.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <system_error>

#include "phasefield/error.hpp"

namespace phasefield {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Shortest representation that parses back to the same double.
std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& key, const std::string& value, int line) {
  double v = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("value of '" + key + "' is not a number: '" + value + "'", line);
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& value, int line) {
  Int v = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("value of '" + key + "' is not an integer: '" + value + "'", line);
  }
  return v;
}

void require(bool ok, const std::string& what, int line) {
  if (!ok) throw ConfigError("invalid value: " + what, line);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [](auto get, bool must_be_positive) {
      return Setter([get, must_be_positive](RunConfig& c, const std::string& k,
                                            const std::string& v, int line) {
        const double x = parse_real(k, v, line);
        if (must_be_positive) require(x > 0.0, k + " must be positive", line);
        get(c) = x;
      });
    };
    t["scheme"] = [](RunConfig& c, const std::string&, const std::string& v, int line) {
      try {
        c.scheme.scheme = parse_scheme(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), line);
      }
    };
    t["n"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      const int n = parse_int<int>(k, v, line);
      require(n >= 2, "n must be >= 2", line);
      c.scheme.n = n;
    };
    t["tau"] = real([](RunConfig& c) -> double& { return c.scheme.tau; }, true);
    t["T"] = real([](RunConfig& c) -> double& { return c.scheme.final_time; }, true);
    t["gamma"] = real([](RunConfig& c) -> double& { return c.scheme.laws.gamma; }, true);
    t["mobility_floor"] = real([](RunConfig& c) -> double& { return c.scheme.laws.mobility_floor; }, true);
    t["mobility_scale"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      const double x = parse_real(k, v, line);
      require(x >= 0.0, k + " must be non-negative", line);
      c.scheme.laws.mobility_scale = x;
    };
    t["alpha0"] = real([](RunConfig& c) -> double& { return c.scheme.laws.alpha0; }, true);
    t["alpha1"] = real([](RunConfig& c) -> double& { return c.scheme.laws.alpha1; }, true);
    t["eta0"] = real([](RunConfig& c) -> double& { return c.scheme.laws.eta0; }, true);
    t["eta1"] = real([](RunConfig& c) -> double& { return c.scheme.laws.eta1; }, true);
    t["newton_tol"] = real([](RunConfig& c) -> double& { return c.scheme.newton_tol; }, true);
    t["damping"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      const double x = parse_real(k, v, line);
      require(x > 0.0 && x <= 1.0, "damping must be in (0, 1]", line);
      c.scheme.damping = x;
    };
    t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      c.scheme.seed = parse_int<std::uint64_t>(k, v, line);
    };
    t["newton_max_iter"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      const int x = parse_int<int>(k, v, line);
      require(x >= 1, "newton_max_iter must be >= 1", line);
      c.scheme.newton_max_iter = x;
    };
    t["darcy_order"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      const int x = parse_int<int>(k, v, line);
      require(x == 0 || x == 1, "darcy_order must be 0 or 1", line);
      c.scheme.darcy_order = x;
    };
    t["quad_degree"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      const int x = parse_int<int>(k, v, line);
      require(x >= 1 && x <= 8, "quad_degree must be in 1..8", line);
      c.scheme.quad_degree = x;
    };
    t["out"] = [](RunConfig& c, const std::string&, const std::string& v, int line) {
      require(!v.empty(), "out must not be empty", line);
      c.output_dir = v;
    };
    t["stride"] = [](RunConfig& c, const std::string& k, const std::string& v, int line) {
      const int x = parse_int<int>(k, v, line);
      require(x >= 0, "stride must be >= 0", line);
      c.stride = x;
    };
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  int time_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + content + "'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line);
    it->second(config, key, value, line);
    if (key == "T" || key == "tau") time_line = line;
  }
  if (!(config.scheme.final_time >= config.scheme.tau * (1.0 - 1e-9))) {
    throw ConfigError("invalid value: T must be >= tau", time_line);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file (file not found or unreadable)", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  const SchemeConfig& s = c.scheme;
  std::ostringstream out;
  out << "scheme=" << to_string(s.scheme) << "\n"
      << "n=" << s.n << "\n"
      << "tau=" << format_real(s.tau) << "\n"
      << "T=" << format_real(s.final_time) << "\n"
      << "gamma=" << format_real(s.laws.gamma) << "\n"
      << "mobility_scale=" << format_real(s.laws.mobility_scale) << "\n"
      << "mobility_floor=" << format_real(s.laws.mobility_floor) << "\n"
      << "alpha0=" << format_real(s.laws.alpha0) << "\n"
      << "alpha1=" << format_real(s.laws.alpha1) << "\n"
      << "eta0=" << format_real(s.laws.eta0) << "\n"
      << "eta1=" << format_real(s.laws.eta1) << "\n"
      << "seed=" << s.seed << "\n"
      << "newton_tol=" << format_real(s.newton_tol) << "\n"
      << "newton_max_iter=" << s.newton_max_iter << "\n"
      << "damping=" << format_real(s.damping) << "\n"
      << "darcy_order=" << s.darcy_order << "\n"
      << "quad_degree=" << s.quad_degree << "\n"
      << "out=" << c.output_dir << "\n"
      << "stride=" << c.stride << "\n";
  return out.str();
}

RunConfig preset_config(SchemeKind scheme) {
  RunConfig c;
  c.scheme.scheme = scheme;
  // Latest snapshot times of the reference experiments.
  c.scheme.final_time = scheme == SchemeKind::CHD ? 1.3 : 3.0;
  c.output_dir = "out-" + to_string(scheme);
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FieldVector initial_phi(std::uint64_t seed, std::shared_ptr<const DofMap> space) {
  if (!space || space->kind() != SpaceKind::P1C) {
    throw SpaceMismatch("initial_phi expects a P1C space");
  }
  FieldVector phi(space);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double unit = static_cast<double>(splitmix64(seed + i)) * 0x1.0p-64;
    phi.coefficients[i] = 0.4 + (unit * 2.0 - 1.0) * 1e-3;
  }
  return phi;
}

const char* const kCsvHeader =
    "step,time,mass,E_total,E_interf,E_bulk,E_kin,diss_mob,diss_alpha,diss_visc,balance_res,"
    "Lx,Ly,P,div_norm,newton_iters,newton_res";

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(const DiagnosticsRecord& r, std::ostream& out) {
  out << r.step;
  for (double v : {r.time, r.mass, r.e_total, r.e_interf, r.e_bulk, r.e_kin, r.diss_mob,
                   r.diss_alpha, r.diss_visc, r.balance_res, r.lx, r.ly, r.angular, r.div_norm}) {
    out << ',' << format_real(v);
  }
  out << ',' << r.newton_iters << ',' << format_real(r.newton_res) << '\n';
}

void write_vtk(const std::filesystem::path& path, const Discretization& disc,
               const SchemeState& state) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing", path.string());

  const Mesh& mesh = disc.mesh();
  const int n = mesh.n();
  const int side = n + 1;
  const std::size_t num_points = static_cast<std::size_t>(side) * side;
  auto unwrapped = [n, side](int vertex, const std::array<int, 2>& shift) {
    return (vertex % n + shift[0] * n) + side * (vertex / n + shift[1] * n);
  };
  // Source vertex of every output point.
  std::vector<int> source(num_points);
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) source[i + side * j] = (i % n) + n * (j % n);
  }

  out << "# vtk DataFile Version 3.0\n"
      << "phasefield step " << state.step << " time " << format_real(state.time) << "\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << num_points << " double\n";
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      out << format_real(static_cast<double>(i) / n) << ' ' << format_real(static_cast<double>(j) / n)
          << " 0\n";
    }
  }
  const std::size_t nt = mesh.num_triangles();
  out << "CELLS " << nt << ' ' << 4 * nt << "\n";
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangle(t);
    out << 3;
    for (int k = 0; k < 3; ++k) out << ' ' << unwrapped(tri[k], mesh.shift(t, k));
    out << '\n';
  }
  out << "CELL_TYPES " << nt << "\n";
  for (std::size_t t = 0; t < nt; ++t) out << "5\n";

  const bool rt = state.has_velocity() && is_raviart_thomas(state.velocity.space->kind());
  if (rt) {
    out << "CELL_DATA " << nt << "\nVECTORS velocity double\n";
    const std::array<Point, 1> centroid = {Point{1.0 / 3.0, 1.0 / 3.0}};
    for (std::size_t t = 0; t < nt; ++t) {
      const auto v = evaluate(state.velocity, t, centroid);
      out << format_real(v[0][0]) << ' ' << format_real(v[0][1]) << " 0\n";
    }
  }
  out << "POINT_DATA " << num_points << "\n";
  auto scalars = [&](const char* name, const FieldVector& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t p = 0; p < num_points; ++p) out << format_real(f.coefficients[source[p]]) << '\n';
  };
  scalars("phi", state.phi);
  if (state.mu.space) scalars("mu", state.mu);
  if (state.has_velocity() && state.velocity.space->kind() == SpaceKind::P2C_VEC) {
    // Vertex dofs come first in each component block.
    const std::size_t half = state.velocity.size() / 2;
    out << "VECTORS velocity double\n";
    for (std::size_t p = 0; p < num_points; ++p) {
      out << format_real(state.velocity.coefficients[source[p]]) << ' '
          << format_real(state.velocity.coefficients[half + source[p]]) << " 0\n";
    }
  }
  out.flush();
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace phasefield
