#pragma once

#include <string>

#include "phasefield/assembly.hpp"
#include "phasefield/state.hpp"

namespace phasefield {

/// Structure report of one time step. Dissipation entries are rates (not
/// multiplied by the step size); terms that do not belong to the scheme are 0.
struct DiagnosticsRecord {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;
  double e_total = 0.0;
  double e_interf = 0.0;
  double e_bulk = 0.0;
  double e_kin = 0.0;
  double diss_mob = 0.0;
  double diss_alpha = 0.0;
  double diss_visc = 0.0;
  double balance_res = 0.0;
  double lx = 0.0;
  double ly = 0.0;
  double angular = 0.0;
  double div_norm = 0.0;
  int newton_iters = 0;
  double newton_res = 0.0;
};

struct EnergyParts {
  double interfacial = 0.0;  // gamma/2 ||grad phi||^2
  double bulk = 0.0;         // int f(phi)
  double kinetic = 0.0;      // beta/2 ||v||^2
  double total = 0.0;
};

struct Momenta {
  double lx = 0.0;
  double ly = 0.0;
  double angular = 0.0;  // int (v1 x2 - v2 x1)
};

struct Dissipation {
  double mobility = 0.0;  // <m(phi) grad mu, grad mu>
  double darcy = 0.0;     // <alpha(phi) v, v>
  double viscous = 0.0;   // <eta(phi) Dv, Dv>
};

/// 1 for CHNS, 0 otherwise.
double kinetic_weight(SchemeKind scheme);

double mass(const Discretization& disc, const FieldVector& phi);

/// `velocity` may be empty (null space); the kinetic part is then zero.
EnergyParts energy(const Discretization& disc, const MaterialLaws& laws, const FieldVector& phi,
                   const FieldVector& velocity, double beta);

Momenta momenta(const Discretization& disc, const FieldVector& velocity);

/// ||div v||_{L2}, elementwise divergence.
double divergence_norm(const Discretization& disc, const FieldVector& velocity);

Dissipation dissipation(const Discretization& disc, const MaterialLaws& laws,
                        const SchemeState& state);

/// Absolute defect of the sharp per-step energy identity
///   E(next) - E(prev) + tau * (dissipation at next)
///     + gamma/2 ||grad(phi_next - phi_prev)||^2 + beta/2 ||v_next - v_prev||^2 = 0.
double balance_residual(const Discretization& disc, const MaterialLaws& laws, double tau,
                        const SchemeState& prev, const SchemeState& next);

/// Full record for the step prev -> next.
DiagnosticsRecord make_record(const Discretization& disc, const MaterialLaws& laws, double tau,
                              const SchemeState& prev, const SchemeState& next,
                              int newton_iters, double newton_res);

}  // namespace phasefield
