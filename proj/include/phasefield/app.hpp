#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "phasefield/diagnostics.hpp"
#include "phasefield/schemes.hpp"

namespace phasefield {

/// Everything a `run` needs. Parsed from and serialized to flat key=value text.
///
/// Keys: scheme n tau T gamma mobility_scale mobility_floor alpha0 alpha1 eta0
/// eta1 seed newton_tol newton_max_iter damping darcy_order quad_degree out
/// stride
struct RunConfig {
  SchemeConfig scheme;
  std::string output_dir = "out";
  /// VTK output every `stride` steps; 0 disables field output.
  int stride = 100;

  RunConfig() { scheme.final_time = 0.1; }
};

/// Throws ConfigError (with line number) on a malformed line, an unknown key,
/// a non-numeric value or a violated invariant.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);
/// Experiment defaults for one scheme.
RunConfig preset_config(SchemeKind scheme);

/// splitmix64 output for state x: mixes x + 0x9e3779b97f4a7c15.
std::uint64_t splitmix64(std::uint64_t x);

/// phi_i = 0.4 + u_i, u_i = (splitmix64(seed + i) / 2^64 * 2 - 1) * 1e-3 per P1 dof.
FieldVector initial_phi(std::uint64_t seed, std::shared_ptr<const DofMap> space);

extern const char* const kCsvHeader;
void write_csv_header(std::ostream& out);
/// 17 comma-separated fields, reals with 17 significant digits.
void write_csv_row(const DiagnosticsRecord& record, std::ostream& out);

/// Legacy ASCII VTK unstructured grid. The periodic seam is duplicated, so
/// the file has (n+1)^2 points. Point data phi and mu; velocity as point data
/// (CHNS, vertex values) or cell data (CHD, centroid values).
void write_vtk(const std::filesystem::path& path, const Discretization& disc,
               const SchemeState& state);

/// Invariant self-check on tiny meshes; prints one PASS/FAIL line per check.
bool run_checks(std::ostream& out);

/// Entry point of the command line tool. Returns the process exit code:
/// 0 success, 1 run failure, 2 usage error.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace phasefield
