#include "phasefield/schemes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phasefield {

int SchemeConfig::num_steps() const {
  return static_cast<int>(std::floor(final_time / tau * (1.0 + 1e-9)));
}

void SchemeConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(final_time >= tau * (1.0 - 1e-9))) throw std::invalid_argument("T must be >= tau");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must be in (0, 1]");
  if (darcy_order != 0 && darcy_order != 1) throw std::invalid_argument("darcy_order must be 0 or 1");
  if (quad_degree < 1 || quad_degree > 8) throw std::invalid_argument("quad_degree must be in 1..8");
  laws.validate();
}

Stepper::Stepper(SchemeConfig config, std::shared_ptr<const Mesh> mesh)
    : config_(std::move(config)) {
  config_.validate();
  if (!mesh) {
    mesh = std::make_shared<const Mesh>(Mesh::periodic_unit_square(config_.n));
  } else if (mesh->n() != config_.n) {
    throw std::invalid_argument("mesh size does not match config n");
  }
  disc_ = std::make_shared<const Discretization>(mesh, config_.scheme, config_.darcy_order,
                                                  config_.quad_degree);
}

SchemeState Stepper::initial_state(const FieldVector& phi0,
                                   const std::optional<FieldVector>& velocity0) const {
  const Discretization& disc = *disc_;
  if (!phi0.space || phi0.space->kind() != SpaceKind::P1C || phi0.size() != disc.scalar_space()->num_dofs()) {
    throw SpaceMismatch("initial phi must be a P1C field on the run's mesh");
  }
  SchemeState s;
  s.phi = FieldVector(disc.scalar_space(), phi0.coefficients);
  s.mu = FieldVector(disc.scalar_space());
  if (disc.velocity_space()) {
    s.velocity = FieldVector(disc.velocity_space());
    s.pressure = FieldVector(disc.pressure_space());
    if (velocity0 && config_.scheme == SchemeKind::CHNS) {
      if (velocity0->size() != s.velocity.size()) {
        throw SpaceMismatch("initial velocity does not match the velocity space");
      }
      s.velocity.coefficients = velocity0->coefficients;
    }
  }
  return s;
}

std::vector<double> Stepper::pack(const SchemeState& state) const {
  const BlockLayout& layout = disc_->layout();
  std::vector<double> x(layout.total, 0.0);
  std::copy(state.phi.coefficients.begin(), state.phi.coefficients.end(), x.begin() + layout.phi);
  std::copy(state.mu.coefficients.begin(), state.mu.coefficients.end(), x.begin() + layout.mu);
  if (config_.scheme == SchemeKind::CHNS) {
    std::copy(state.velocity.coefficients.begin(), state.velocity.coefficients.end(),
              x.begin() + layout.velocity);
    std::copy(state.pressure.coefficients.begin(), state.pressure.coefficients.end(),
              x.begin() + layout.pressure);
  }
  // CHD velocity and pressure are recomputed from zero every step.
  return x;
}

std::pair<SchemeState, NewtonReport> Stepper::step(const SchemeState& state) {
  const Discretization& disc = *disc_;
  const BlockLayout& layout = disc.layout();
  std::vector<double> x = pack(state);
  const std::vector<double>& phi_old = state.phi.coefficients;
  const std::vector<double> empty;
  const std::vector<double>& v_old =
      config_.scheme == SchemeKind::CHNS ? state.velocity.coefficients : empty;

  NewtonReport report;
  std::vector<double> residual;
  SparseMatrix jacobian;
  for (;;) {
    const FormContext ctx{disc, config_.laws, config_.tau, x, phi_old, v_old};
    assemble_system(ctx, &residual, &jacobian);
    report.residual = norm_inf(residual);
    if (!std::isfinite(report.residual)) break;
    if (report.residual <= config_.newton_tol) {
      report.converged = true;
      break;
    }
    if (report.iterations >= config_.newton_max_iter) break;
    solver_.factorize(jacobian);
    const std::vector<double> delta = solver_.solve(residual);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= config_.damping * delta[i];
    ++report.iterations;
  }
  if (!report.converged) {
    std::ostringstream msg;
    msg << "Newton did not converge at step " << state.step + 1 << " after " << report.iterations
        << " iterations (residual " << report.residual << ", tolerance " << config_.newton_tol << ")";
    throw StepFailure(msg.str(), report, state);
  }

  SchemeState next;
  next.step = state.step + 1;
  next.time = next.step * config_.tau;
  auto slice = [&x](int offset, int count) {
    return std::vector<double>(x.begin() + offset, x.begin() + offset + count);
  };
  next.phi = FieldVector(disc.scalar_space(), slice(layout.phi, layout.num_scalar));
  next.mu = FieldVector(disc.scalar_space(), slice(layout.mu, layout.num_scalar));
  if (layout.has_flow()) {
    next.velocity = FieldVector(disc.velocity_space(), slice(layout.velocity, layout.num_velocity));
    next.pressure = FieldVector(disc.pressure_space(), slice(layout.pressure, layout.num_pressure));
  }
  return {std::move(next), report};
}

SchemeState run(Stepper& stepper, const SchemeState& initial, const RunSinks& sinks) {
  const SchemeConfig& config = stepper.config();
  const int steps = config.num_steps();
  SchemeState current = initial;
  if (sinks.fields && sinks.field_stride > 0) sinks.fields(current);
  for (int k = 0; k < steps; ++k) {
    auto [next, report] = stepper.step(current);
    if (sinks.diagnostics) {
      sinks.diagnostics(make_record(stepper.discretization(), config.laws, config.tau, current, next,
                                    report.iterations, report.residual));
    }
    if (sinks.fields && sinks.field_stride > 0 && next.step % sinks.field_stride == 0) {
      sinks.fields(next);
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace phasefield
