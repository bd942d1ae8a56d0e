#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "phasefield/app.hpp"
#include "phasefield/error.hpp"

using namespace phasefield;
namespace fs = std::filesystem;

namespace {

// Independent splitmix64 reference.
std::uint64_t reference_splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phasefield_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("parse config with defaults") {
  const RunConfig c = parse_config("scheme=ch\nn=16\nT=0.01");
  CHECK(c.scheme.scheme == SchemeKind::CH);
  CHECK(c.scheme.n == 16);
  CHECK(c.scheme.final_time == 0.01);
  CHECK(c.scheme.laws.gamma == 1e-4);
  CHECK(c.scheme.tau == 1e-3);
  CHECK(c.scheme.newton_tol == 1e-11);
  CHECK(c.scheme.laws.alpha0 == 1e-2);
  CHECK(c.scheme.laws.alpha1 == 1.0);
  CHECK(c.scheme.laws.eta0 == 1e-4);
  CHECK(c.scheme.laws.eta1 == 1e-2);
  CHECK(parse_config("").scheme.n == 64);
}

TEST_CASE("comments and blank lines") {
  const RunConfig c = parse_config("# comment\n\n  scheme = chns  # trailing\nseed=18446744073709551615\n");
  CHECK(c.scheme.scheme == SchemeKind::CHNS);
  CHECK(c.scheme.seed == 18446744073709551615ULL);
}

TEST_CASE("config errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("tau=0") == 1);
  CHECK(line_of("schem=ch") == 1);
  CHECK(line_of("scheme=ch\nn=abc") == 2);
  CHECK(line_of("scheme=ch\n\njust text") == 3);
  CHECK(line_of("n=1") == 1);
  CHECK(line_of("scheme=stokes") == 1);
  CHECK(line_of("n=16\ntau=0.1\nT=0.01") == 3);
  try {
    parse_config("schem=ch");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    CHECK(std::string(e.what()).find("schem") != std::string::npos);
  }
}

TEST_CASE("config round trip") {
  RunConfig c;
  c.scheme.scheme = SchemeKind::CHD;
  c.scheme.n = 12;
  c.scheme.tau = 0.1 / 3.0;
  c.scheme.final_time = 0.7;
  c.scheme.laws.gamma = 3.3e-5;
  c.scheme.seed = 12345678901234ULL;
  c.scheme.darcy_order = 1;
  c.output_dir = "some/dir";
  c.stride = 7;
  const RunConfig d = parse_config(serialize_config(c));
  CHECK(serialize_config(d) == serialize_config(c));
  CHECK(d.scheme.tau == c.scheme.tau);
  CHECK(d.scheme.laws.gamma == c.scheme.laws.gamma);
  CHECK(d.scheme.seed == c.scheme.seed);
  CHECK(d.output_dir == "some/dir");
}

TEST_CASE("presets") {
  for (SchemeKind s : {SchemeKind::CH, SchemeKind::CHD, SchemeKind::CHNS}) {
    const RunConfig c = preset_config(s);
    CHECK(c.scheme.scheme == s);
    CHECK(c.scheme.laws.gamma == 1e-4);
    CHECK(c.scheme.tau == 1e-3);
    CHECK(c.scheme.newton_tol == 1e-11);
    CHECK(c.scheme.n == 64);
    CHECK_NOTHROW(parse_config(serialize_config(c)));
  }
}

TEST_CASE("splitmix64") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  for (std::uint64_t x : {0ULL, 1ULL, 42ULL, 0xffffffffffffffffULL}) CHECK(splitmix64(x) == reference_splitmix64(x));
}

TEST_CASE("initial phi") {
  const auto mesh = std::make_shared<const Mesh>(Mesh::periodic_unit_square(8));
  const auto p1 = DofMap::build(mesh, SpaceKind::P1C);
  const FieldVector a = initial_phi(42, p1);
  const double u0 = (static_cast<double>(reference_splitmix64(42)) / 18446744073709551616.0 * 2.0 - 1.0) * 1e-3;
  CHECK(a.coefficients[0] == 0.4 + u0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.coefficients[i] >= 0.399);
    CHECK(a.coefficients[i] <= 0.401);
  }
  CHECK(initial_phi(42, p1).coefficients == a.coefficients);
  CHECK(initial_phi(43, p1).coefficients != a.coefficients);
}

TEST_CASE("CSV rows") {
  DiagnosticsRecord r;
  r.step = 3;
  r.time = 0.003;
  r.mass = 0.1 + 0.2;
  r.e_total = 1.0 / 3.0;
  r.newton_iters = 2;
  r.newton_res = 1.5e-13;
  std::ostringstream out;
  write_csv_header(out);
  write_csv_row(r, out);
  const auto lines = split(out.str(), '\n');
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "step,time,mass,E_total,E_interf,E_bulk,E_kin,diss_mob,diss_alpha,diss_visc,"
                    "balance_res,Lx,Ly,P,div_norm,newton_iters,newton_res");
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 17);
  CHECK(fields[0] == "3");
  CHECK(std::stod(fields[2]) == r.mass);
  CHECK(std::stod(fields[3]) == r.e_total);
  CHECK(fields[15] == "2");
  CHECK(std::stod(fields[16]) == r.newton_res);
}

TEST_CASE("VTK output") {
  const auto mesh = std::make_shared<const Mesh>(Mesh::periodic_unit_square(2));
  Discretization disc(mesh, SchemeKind::CH);
  SchemeState s;
  s.phi = interpolate(disc.scalar_space(), [](Point) { return 0.4; });
  s.mu = interpolate(disc.scalar_space(), [](Point) { return 0.4; });
  const fs::path dir = scratch("vtk");
  fs::create_directories(dir);
  write_vtk(dir / "f.vtk", disc, s);
  const std::string text = slurp(dir / "f.vtk");
  CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(text.find("POINTS 9 double") != std::string::npos);
  CHECK(text.find("CELLS 8 32") != std::string::npos);
  CHECK(text.find("POINT_DATA 9") != std::string::npos);
  const auto pos = text.find("SCALARS phi");
  REQUIRE(pos != std::string::npos);
  std::istringstream in(text.substr(pos));
  std::string skip;
  std::getline(in, skip);
  std::getline(in, skip);
  for (int i = 0; i < 9; ++i) {
    double v = 0.0;
    in >> v;
    CHECK(v == 0.4);
  }

  // A regular file in place of the directory.
  std::ofstream(dir / "blocker") << "x";
  const fs::path bad = dir / "blocker" / "f.vtk";
  try {
    write_vtk(bad, disc, s);
    FAIL("expected an I/O error");
  } catch (const IoError& e) {
    CHECK(e.path() == bad.string());
    CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("CLI preset, check and usage errors") {
  std::string out, err;
  CHECK(cli({"preset", "ch"}, &out) == 0);
  CHECK(out.find("scheme=ch") != std::string::npos);
  const RunConfig preset = parse_config(out);
  CHECK(preset.scheme.scheme == SchemeKind::CH);
  CHECK(preset.scheme.laws.gamma == 1e-4);
  CHECK(preset.scheme.tau == 1e-3);

  CHECK(cli({"check"}, &out) == 0);
  CHECK(out.find("FAIL") == std::string::npos);

  CHECK(cli({"run", "--config", "missing.cfg"}, &out, &err) == 1);
  CHECK(err.find("missing.cfg") != std::string::npos);
  CHECK(err.find("error: io") == 0);
  CHECK(std::count(err.begin(), err.end(), '\n') == 1);

  CHECK(cli({"run"}, &out, &err) == 2);
  CHECK(cli({"bogus"}, &out, &err) == 2);
  CHECK(cli({"preset", "navier"}, &out, &err) == 2);
  CHECK(cli({"--help"}, &out, &err) == 0);
}

TEST_CASE("CLI run writes diagnostics and fields") {
  const fs::path dir = scratch("cli_run");
  fs::create_directories(dir);
  const fs::path cfg = dir / "c.cfg";
  std::ofstream(cfg) << "scheme=chd\nn=4\nT=0.004\nseed=5\nstride=2\nout=" << (dir / "ignored").string() << "\n";

  std::string out, err;
  const fs::path out1 = dir / "a";
  REQUIRE(cli({"run", "--config", cfg.string(), "--out", out1.string()}, &out, &err) == 0);
  CHECK(out.find("steps=4") != std::string::npos);
  CHECK(out.find("max_div_norm=") != std::string::npos);
  const auto lines = split(slurp(out1 / "diagnostics.csv"), '\n');
  CHECK(lines.size() == 5);
  CHECK(fs::exists(out1 / "fields_000000.vtk"));
  CHECK(fs::exists(out1 / "fields_000002.vtk"));
  CHECK(fs::exists(out1 / "fields_000004.vtk"));
  CHECK_FALSE(fs::exists(dir / "ignored"));

  // Same config and seed: byte-identical output. A different seed changes it.
  const fs::path out2 = dir / "b";
  REQUIRE(cli({"run", "--config", cfg.string(), "--out", out2.string()}) == 0);
  CHECK(slurp(out1 / "diagnostics.csv") == slurp(out2 / "diagnostics.csv"));
  const fs::path out3 = dir / "c";
  REQUIRE(cli({"run", "--config", cfg.string(), "--out", out3.string(), "--seed", "6"}) == 0);
  CHECK(slurp(out1 / "diagnostics.csv") != slurp(out3 / "diagnostics.csv"));

  // The environment variable overrides the config file but not --out.
  const fs::path env_dir = dir / "env";
  ::setenv("PHASEFIELD_OUT", env_dir.string().c_str(), 1);
  REQUIRE(cli({"run", "--config", cfg.string()}) == 0);
  CHECK(fs::exists(env_dir / "diagnostics.csv"));
  ::unsetenv("PHASEFIELD_OUT");
  fs::remove_all(dir);
}

TEST_CASE("CLI run into an unwritable location") {
  const fs::path dir = scratch("cli_bad");
  fs::create_directories(dir);
  std::ofstream(dir / "blocker") << "x";
  const fs::path cfg = dir / "c.cfg";
  std::ofstream(cfg) << "scheme=ch\nn=2\nT=0.001\n";
  std::string err;
  CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "blocker" / "out").string()}, nullptr, &err) == 1);
  CHECK(err.find("error: io") == 0);
  CHECK(err.find("blocker") != std::string::npos);
  fs::remove_all(dir);
}
