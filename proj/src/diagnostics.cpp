#include "phasefield/diagnostics.hpp"

#include <cmath>

#include "phasefield/error.hpp"

namespace phasefield {

namespace {

void require_scalar(const Discretization& disc, const FieldVector& f, const char* what) {
  if (!f.space || f.space->kind() != SpaceKind::P1C || f.space->mesh_ptr() != disc.mesh_ptr()) {
    throw SpaceMismatch(std::string(what) + " must be a P1C field on the run's mesh");
  }
}

void require_velocity(const Discretization& disc, const FieldVector& f) {
  if (!disc.velocity_space() || !f.space || f.space->kind() != disc.velocity_space()->kind() ||
      f.space->mesh_ptr() != disc.mesh_ptr()) {
    throw SpaceMismatch("velocity does not belong to the run's velocity space");
  }
}

struct ScalarAt {
  double value = 0.0;
  double grad[2] = {0.0, 0.0};
};

ScalarAt scalar_at(const Tabulation& tab, std::span<const int> dofs, const FieldVector& f, int q) {
  ScalarAt out;
  for (int i = 0; i < tab.num_dofs; ++i) {
    const double c = f.coefficients[dofs[i]];
    out.value += c * tab.value(q, i);
    out.grad[0] += c * tab.grad(q, i, 0, 0);
    out.grad[1] += c * tab.grad(q, i, 0, 1);
  }
  return out;
}

struct VectorAt {
  double value[2] = {0.0, 0.0};
  double grad[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double div = 0.0;
};

VectorAt vector_at(const Tabulation& tab, std::span<const int> dofs, const FieldVector& f, int q) {
  VectorAt out;
  for (int i = 0; i < tab.num_dofs; ++i) {
    const double c = f.coefficients[dofs[i]];
    for (int a = 0; a < 2; ++a) {
      out.value[a] += c * tab.value(q, i, a);
      for (int d = 0; d < 2; ++d) out.grad[a][d] += c * tab.grad(q, i, a, d);
    }
    out.div += c * tab.div(q, i);
  }
  return out;
}

// Runs body(weight, element basis, q, t) over every quadrature point.
template <class Body>
void for_each_point(const Discretization& disc, Body body) {
  ElementBasis eb;
  const QuadratureRule& rule = disc.rule();
  for (std::size_t t = 0; t < disc.mesh().num_triangles(); ++t) {
    disc.element_basis(t, eb);
    for (int q = 0; q < static_cast<int>(rule.size()); ++q) {
      body(rule.weights[q] * eb.geometry.det, eb, q, t);
    }
  }
}

}  // namespace

double kinetic_weight(SchemeKind scheme) { return scheme == SchemeKind::CHNS ? 1.0 : 0.0; }

double mass(const Discretization& disc, const FieldVector& phi) {
  require_scalar(disc, phi, "phi");
  double m = 0.0;
  for_each_point(disc, [&](double w, const ElementBasis& eb, int q, std::size_t t) {
    m += w * scalar_at(eb.scalar, disc.scalar_space()->element_dofs(t), phi, q).value;
  });
  return m;
}

EnergyParts energy(const Discretization& disc, const MaterialLaws& laws, const FieldVector& phi,
                   const FieldVector& velocity, double beta) {
  require_scalar(disc, phi, "phi");
  const bool with_v = velocity.space != nullptr && beta != 0.0;
  if (with_v) require_velocity(disc, velocity);
  EnergyParts e;
  for_each_point(disc, [&](double w, const ElementBasis& eb, int q, std::size_t t) {
    const ScalarAt p = scalar_at(eb.scalar, disc.scalar_space()->element_dofs(t), phi, q);
    e.interfacial += w * 0.5 * laws.gamma * (p.grad[0] * p.grad[0] + p.grad[1] * p.grad[1]);
    e.bulk += w * double_well(p.value);
    if (with_v) {
      const VectorAt v = vector_at(eb.velocity, disc.velocity_space()->element_dofs(t), velocity, q);
      e.kinetic += w * 0.5 * beta * (v.value[0] * v.value[0] + v.value[1] * v.value[1]);
    }
  });
  e.total = e.interfacial + e.bulk + e.kinetic;
  return e;
}

Momenta momenta(const Discretization& disc, const FieldVector& velocity) {
  require_velocity(disc, velocity);
  Momenta m;
  const QuadratureRule& rule = disc.rule();
  for_each_point(disc, [&](double w, const ElementBasis& eb, int q, std::size_t t) {
    const VectorAt v = vector_at(eb.velocity, disc.velocity_space()->element_dofs(t), velocity, q);
    const Point x = eb.geometry.map(rule.points[q].x, rule.points[q].y);
    m.lx += w * v.value[0];
    m.ly += w * v.value[1];
    m.angular += w * (v.value[0] * x.y - v.value[1] * x.x);
  });
  return m;
}

double divergence_norm(const Discretization& disc, const FieldVector& velocity) {
  require_velocity(disc, velocity);
  double s = 0.0;
  for_each_point(disc, [&](double w, const ElementBasis& eb, int q, std::size_t t) {
    const VectorAt v = vector_at(eb.velocity, disc.velocity_space()->element_dofs(t), velocity, q);
    s += w * v.div * v.div;
  });
  return std::sqrt(s);
}

Dissipation dissipation(const Discretization& disc, const MaterialLaws& laws,
                        const SchemeState& state) {
  require_scalar(disc, state.phi, "phi");
  require_scalar(disc, state.mu, "mu");
  const SchemeKind scheme = disc.scheme();
  const bool flow = scheme != SchemeKind::CH;
  if (flow) require_velocity(disc, state.velocity);
  Dissipation d;
  for_each_point(disc, [&](double w, const ElementBasis& eb, int q, std::size_t t) {
    const auto sdofs = disc.scalar_space()->element_dofs(t);
    const ScalarAt phi = scalar_at(eb.scalar, sdofs, state.phi, q);
    const ScalarAt mu = scalar_at(eb.scalar, sdofs, state.mu, q);
    d.mobility += w * mobility(laws, phi.value) * (mu.grad[0] * mu.grad[0] + mu.grad[1] * mu.grad[1]);
    if (!flow) return;
    const VectorAt v =
        vector_at(eb.velocity, disc.velocity_space()->element_dofs(t), state.velocity, q);
    if (scheme == SchemeKind::CHD) {
      d.darcy += w * alpha(laws, phi.value) * (v.value[0] * v.value[0] + v.value[1] * v.value[1]);
    } else {
      const double off = 0.5 * (v.grad[0][1] + v.grad[1][0]);
      const double dd = v.grad[0][0] * v.grad[0][0] + 2.0 * off * off + v.grad[1][1] * v.grad[1][1];
      d.viscous += w * eta(laws, phi.value) * dd;
    }
  });
  return d;
}

double balance_residual(const Discretization& disc, const MaterialLaws& laws, double tau,
                        const SchemeState& prev, const SchemeState& next) {
  const SchemeKind scheme = disc.scheme();
  if (prev.has_velocity() != next.has_velocity() ||
      (scheme == SchemeKind::CH) == next.has_velocity()) {
    throw SpaceMismatch("states do not match scheme " + to_string(scheme));
  }
  const double beta = kinetic_weight(scheme);
  const EnergyParts e_prev = energy(disc, laws, prev.phi, prev.velocity, beta);
  const EnergyParts e_next = energy(disc, laws, next.phi, next.velocity, beta);
  const Dissipation diss = dissipation(disc, laws, next);

  FieldVector dphi(next.phi.space);
  for (std::size_t i = 0; i < dphi.size(); ++i) {
    dphi.coefficients[i] = next.phi.coefficients[i] - prev.phi.coefficients[i];
  }
  // gamma/2 ||grad dphi||^2 is the interfacial energy of the increment.
  double remainder = energy(disc, laws, dphi, FieldVector(), 0.0).interfacial;
  if (scheme == SchemeKind::CHNS) {
    FieldVector dv(next.velocity.space);
    for (std::size_t i = 0; i < dv.size(); ++i) {
      dv.coefficients[i] = next.velocity.coefficients[i] - prev.velocity.coefficients[i];
    }
    double kin = 0.0;
    for_each_point(disc, [&](double w, const ElementBasis& eb, int q, std::size_t t) {
      const VectorAt v = vector_at(eb.velocity, disc.velocity_space()->element_dofs(t), dv, q);
      kin += w * 0.5 * (v.value[0] * v.value[0] + v.value[1] * v.value[1]);
    });
    remainder += kin;
  }
  const double defect = e_next.total - e_prev.total +
                        tau * (diss.mobility + diss.darcy + diss.viscous) + remainder;
  return std::abs(defect);
}

DiagnosticsRecord make_record(const Discretization& disc, const MaterialLaws& laws, double tau,
                              const SchemeState& prev, const SchemeState& next,
                              int newton_iters, double newton_res) {
  DiagnosticsRecord r;
  r.step = next.step;
  r.time = next.time;
  r.mass = mass(disc, next.phi);
  const EnergyParts e =
      energy(disc, laws, next.phi, next.velocity, kinetic_weight(disc.scheme()));
  r.e_total = e.total;
  r.e_interf = e.interfacial;
  r.e_bulk = e.bulk;
  r.e_kin = e.kinetic;
  const Dissipation d = dissipation(disc, laws, next);
  r.diss_mob = d.mobility;
  r.diss_alpha = d.darcy;
  r.diss_visc = d.viscous;
  r.balance_res = balance_residual(disc, laws, tau, prev, next);
  if (next.has_velocity()) {
    const Momenta m = momenta(disc, next.velocity);
    r.lx = m.lx;
    r.ly = m.ly;
    r.angular = m.angular;
    r.div_norm = divergence_norm(disc, next.velocity);
  }
  r.newton_iters = newton_iters;
  r.newton_res = newton_res;
  return r;
}

}  // namespace phasefield
