#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "phasefield/assembly.hpp"
#include "phasefield/diagnostics.hpp"
#include "phasefield/error.hpp"
#include "phasefield/la.hpp"
#include "phasefield/state.hpp"

namespace phasefield {

struct SchemeConfig {
  SchemeKind scheme = SchemeKind::CH;
  int n = 64;
  double tau = 1e-3;
  double final_time = 1e-2;
  double newton_tol = 1e-11;
  int newton_max_iter = 50;
  /// Newton update factor; 1 is plain Newton.
  double damping = 1.0;
  MaterialLaws laws;
  /// k of the RT_k / P_k-discontinuous Darcy pair.
  int darcy_order = 0;
  int quad_degree = 6;
  std::uint64_t seed = 0;

  /// floor(T / tau), with a relative slack of 1e-9 so that e.g. T = 0.3,
  /// tau = 0.1 gives 3 steps.
  int num_steps() const;
  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;  // l-infinity norm of the assembled residual
  bool converged = false;
};

/// Newton did not reach the tolerance. Carries the report and the state the
/// step started from.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, NewtonReport report, SchemeState state)
      : Error(what), report_(report), state_(std::move(state)) {}
  const char* kind() const noexcept override { return "step-failure"; }
  const NewtonReport& report() const { return report_; }
  const SchemeState& state() const { return state_; }

 private:
  NewtonReport report_;
  SchemeState state_;
};

/// Advances one scheme by uniform steps with a monolithic Newton solve of
/// the coupled system. Owns the discretization and the factorization, so the
/// symbolic analysis is done once per run.
class Stepper {
 public:
  explicit Stepper(SchemeConfig config, std::shared_ptr<const Mesh> mesh = nullptr);

  const SchemeConfig& config() const { return config_; }
  const Discretization& discretization() const { return *disc_; }
  std::shared_ptr<const Discretization> discretization_ptr() const { return disc_; }

  /// Level-0 state; mu starts at zero, flow fields at `velocity0` (CHNS) or zero.
  SchemeState initial_state(const FieldVector& phi0,
                            const std::optional<FieldVector>& velocity0 = std::nullopt) const;

  /// Throws StepFailure on Newton non-convergence, SingularMatrixError if the
  /// linear system is singular.
  std::pair<SchemeState, NewtonReport> step(const SchemeState& state);

  /// Coupled unknown vector of a state (Newton initial guess layout).
  std::vector<double> pack(const SchemeState& state) const;

 private:
  SchemeConfig config_;
  std::shared_ptr<const Discretization> disc_;
  DirectSolver solver_;
};

struct RunSinks {
  std::function<void(const DiagnosticsRecord&)> diagnostics;
  std::function<void(const SchemeState&)> fields;
  /// Field sink called every `field_stride` steps (and for the initial
  /// state); 0 disables it.
  int field_stride = 0;
};

/// Performs config.num_steps() steps from `initial`, reporting after each.
SchemeState run(Stepper& stepper, const SchemeState& initial, const RunSinks& sinks);

}  // namespace phasefield
