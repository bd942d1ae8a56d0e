#include "phasefield/assembly.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

#include "phasefield/error.hpp"

namespace phasefield {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::CH: return "ch";
    case SchemeKind::CHD: return "chd";
    case SchemeKind::CHNS: return "chns";
  }
  return "?";
}

SchemeKind parse_scheme(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "ch") return SchemeKind::CH;
  if (s == "chd") return SchemeKind::CHD;
  if (s == "chns") return SchemeKind::CHNS;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected ch, chd or chns)");
}

Discretization::Discretization(std::shared_ptr<const Mesh> mesh, SchemeKind scheme,
                               int darcy_order, int quad_degree)
    : scheme_(scheme), mesh_(std::move(mesh)), rule_(quadrature(quad_degree)) {
  scalar_ = DofMap::build(mesh_, SpaceKind::P1C);
  if (scheme == SchemeKind::CHD) {
    if (darcy_order != 0 && darcy_order != 1) {
      throw std::invalid_argument("Darcy order must be 0 or 1, got " + std::to_string(darcy_order));
    }
    velocity_ = DofMap::build(mesh_, darcy_order == 0 ? SpaceKind::RT0 : SpaceKind::RT1);
    pressure_ = DofMap::build(mesh_, darcy_order == 0 ? SpaceKind::P0_DISC : SpaceKind::P1_DISC);
  } else if (scheme == SchemeKind::CHNS) {
    velocity_ = DofMap::build(mesh_, SpaceKind::P2C_VEC);
    pressure_ = DofMap::build(mesh_, SpaceKind::P1C);
  }

  const int ns = static_cast<int>(scalar_->num_dofs());
  layout_.num_scalar = ns;
  layout_.phi = 0;
  layout_.mu = ns;
  layout_.total = 2 * ns;
  if (velocity_) {
    layout_.num_velocity = static_cast<int>(velocity_->num_dofs());
    layout_.num_pressure = static_cast<int>(pressure_->num_dofs());
    layout_.velocity = layout_.total;
    layout_.pressure = layout_.velocity + layout_.num_velocity;
    layout_.multiplier = layout_.pressure + layout_.num_pressure;
    layout_.total = layout_.multiplier + 1;
  }

  ref_scalar_ = tabulate_reference(SpaceKind::P1C, rule_.points);
  if (velocity_) {
    ref_velocity_ = tabulate_reference(velocity_->kind(), rule_.points);
    ref_pressure_ = tabulate_reference(pressure_->kind(), rule_.points);
  }
}

void Discretization::element_basis(std::size_t t, ElementBasis& out) const {
  out.geometry = mesh_->geometry(t);
  push_forward(SpaceKind::P1C, ref_scalar_, out.geometry, scalar_->element_signs(t), out.scalar);
  if (velocity_) {
    push_forward(velocity_->kind(), ref_velocity_, out.geometry, velocity_->element_signs(t),
                 out.velocity);
    push_forward(pressure_->kind(), ref_pressure_, out.geometry, pressure_->element_signs(t),
                 out.pressure);
  }
}

namespace {

// Local unknown ordering on one element: phi(3), mu(3), v(nv), p(np), lambda.
struct LocalLayout {
  int nv = 0, np = 0;
  int phi = 0, mu = 3, v = 6, p = 6, lambda = 6, size = 6;

  LocalLayout(int nv_, int np_, bool flow) : nv(nv_), np(np_) {
    v = 6;
    p = v + nv;
    lambda = p + np;
    size = flow ? lambda + 1 : 6;
  }
};

enum Block { kPhi = 0, kMu, kVel, kPre, kLam };

// Which (row block, column block) pairs carry nonzero Jacobian entries.
bool coupled(SchemeKind scheme, Block row, Block col) {
  if (scheme == SchemeKind::CH) return row <= kMu && col <= kMu;
  switch (row) {
    case kPhi: return col == kPhi || col == kMu || col == kVel;
    case kMu: return col == kPhi || col == kMu;
    case kVel: return col != kLam;
    case kPre: return col == kVel || col == kLam;
    case kLam: return col == kPre;
  }
  return false;
}

void check_context(const FormContext& ctx) {
  const BlockLayout& layout = ctx.disc.layout();
  if (static_cast<int>(ctx.iterate.size()) != layout.total) {
    throw DimensionError("iterate has length " + std::to_string(ctx.iterate.size()) +
                         ", scheme layout needs " + std::to_string(layout.total));
  }
  if (static_cast<int>(ctx.phi_old.size()) != layout.num_scalar) {
    throw DimensionError("old phi has length " + std::to_string(ctx.phi_old.size()));
  }
  if (ctx.disc.scheme() == SchemeKind::CHNS &&
      static_cast<int>(ctx.velocity_old.size()) != layout.num_velocity) {
    throw DimensionError("old velocity has length " + std::to_string(ctx.velocity_old.size()));
  }
  if (!(ctx.tau > 0.0)) throw std::invalid_argument("time step must be positive");
}

}  // namespace

void assemble_system(const FormContext& ctx, std::vector<double>* residual,
                     SparseMatrix* jacobian) {
  check_context(ctx);
  const Discretization& disc = ctx.disc;
  const SchemeKind scheme = disc.scheme();
  const BlockLayout& layout = disc.layout();
  const MaterialLaws& laws = ctx.laws;
  const QuadratureRule& rule = disc.rule();
  const bool flow = layout.has_flow();
  const bool darcy = scheme == SchemeKind::CHD;
  const bool ns = scheme == SchemeKind::CHNS;
  const double inv_tau = 1.0 / ctx.tau;
  const double gamma = laws.gamma;

  const int nv = flow ? disc.velocity_space()->dofs_per_element() : 0;
  const int np = flow ? disc.pressure_space()->dofs_per_element() : 0;
  const LocalLayout loc(nv, np, flow);
  const int L = loc.size;

  std::vector<int> global(L);
  std::vector<Block> block_of(L);
  for (int i = 0; i < 3; ++i) {
    block_of[loc.phi + i] = kPhi;
    block_of[loc.mu + i] = kMu;
  }
  for (int i = 0; i < nv; ++i) block_of[loc.v + i] = kVel;
  for (int i = 0; i < np; ++i) block_of[loc.p + i] = kPre;
  if (flow) block_of[loc.lambda] = kLam;

  std::vector<double> R(L), J(static_cast<std::size_t>(L) * L);
  auto jac = [&](int r, int c) -> double& { return J[static_cast<std::size_t>(r) * L + c]; };

  if (residual) residual->assign(layout.total, 0.0);
  Triplets triplets(layout.total, layout.total);
  if (jacobian) triplets.reserve(disc.mesh().num_triangles() * static_cast<std::size_t>(L) * L);

  ElementBasis eb;
  std::vector<double> lphi(3), lphi_old(3), lmu(3), lv(nv), lv_old(nv), lp(np);
  const auto& x = ctx.iterate;

  for (std::size_t t = 0; t < disc.mesh().num_triangles(); ++t) {
    disc.element_basis(t, eb);
    const double det = eb.geometry.det;
    const auto sdofs = disc.scalar_space()->element_dofs(t);
    for (int i = 0; i < 3; ++i) {
      lphi[i] = x[layout.phi + sdofs[i]];
      lmu[i] = x[layout.mu + sdofs[i]];
      lphi_old[i] = ctx.phi_old[sdofs[i]];
      global[loc.phi + i] = layout.phi + sdofs[i];
      global[loc.mu + i] = layout.mu + sdofs[i];
    }
    double lambda = 0.0;
    if (flow) {
      const auto vdofs = disc.velocity_space()->element_dofs(t);
      const auto pdofs = disc.pressure_space()->element_dofs(t);
      for (int i = 0; i < nv; ++i) {
        lv[i] = x[layout.velocity + vdofs[i]];
        lv_old[i] = ns ? ctx.velocity_old[vdofs[i]] : 0.0;
        global[loc.v + i] = layout.velocity + vdofs[i];
      }
      for (int i = 0; i < np; ++i) {
        lp[i] = x[layout.pressure + pdofs[i]];
        global[loc.p + i] = layout.pressure + pdofs[i];
      }
      lambda = x[layout.multiplier];
      global[loc.lambda] = layout.multiplier;
    }

    std::fill(R.begin(), R.end(), 0.0);
    std::fill(J.begin(), J.end(), 0.0);

    const Tabulation& S = eb.scalar;
    const Tabulation& V = eb.velocity;
    const Tabulation& P = eb.pressure;

    for (int q = 0; q < static_cast<int>(rule.size()); ++q) {
      const double w = rule.weights[q] * det;

      double phi = 0, phi_old = 0, mu = 0;
      double gphi[2] = {0, 0}, gmu[2] = {0, 0};
      for (int i = 0; i < 3; ++i) {
        const double N = S.value(q, i);
        phi += lphi[i] * N;
        phi_old += lphi_old[i] * N;
        mu += lmu[i] * N;
        for (int d = 0; d < 2; ++d) {
          gphi[d] += lphi[i] * S.grad(q, i, 0, d);
          gmu[d] += lmu[i] * S.grad(q, i, 0, d);
        }
      }
      double v[2] = {0, 0}, v_old[2] = {0, 0}, gv[2][2] = {{0, 0}, {0, 0}}, divv = 0, p = 0;
      for (int i = 0; i < nv; ++i) {
        for (int c = 0; c < 2; ++c) {
          v[c] += lv[i] * V.value(q, i, c);
          v_old[c] += lv_old[i] * V.value(q, i, c);
          for (int d = 0; d < 2; ++d) gv[c][d] += lv[i] * V.grad(q, i, c, d);
        }
        divv += lv[i] * V.div(q, i);
      }
      for (int i = 0; i < np; ++i) p += lp[i] * P.value(q, i);

      const double m = mobility(laws, phi);
      const double dm = mobility_prime(laws, phi);
      const double F = dg_potential(phi_old, phi);
      const double dF = dg_potential_db(phi_old, phi);

      // phi and mu rows.
      for (int i = 0; i < 3; ++i) {
        const double Ni = S.value(q, i);
        const double gNi[2] = {S.grad(q, i, 0, 0), S.grad(q, i, 0, 1)};
        const double gmu_gNi = gmu[0] * gNi[0] + gmu[1] * gNi[1];
        const double v_gNi = v[0] * gNi[0] + v[1] * gNi[1];
        R[loc.phi + i] += w * ((phi - phi_old) * inv_tau * Ni - phi * v_gNi + m * gmu_gNi);
        R[loc.mu + i] +=
            w * (mu * Ni - gamma * (gphi[0] * gNi[0] + gphi[1] * gNi[1]) - F * Ni);
        if (!jacobian) continue;
        for (int j = 0; j < 3; ++j) {
          const double Nj = S.value(q, j);
          const double gNj_gNi = S.grad(q, j, 0, 0) * gNi[0] + S.grad(q, j, 0, 1) * gNi[1];
          jac(loc.phi + i, loc.phi + j) +=
              w * (Nj * Ni * inv_tau - Nj * v_gNi + dm * Nj * gmu_gNi);
          jac(loc.phi + i, loc.mu + j) += w * m * gNj_gNi;
          jac(loc.mu + i, loc.mu + j) += w * Nj * Ni;
          jac(loc.mu + i, loc.phi + j) += w * (-gamma * gNj_gNi - dF * Nj * Ni);
        }
        for (int j = 0; j < nv; ++j) {
          jac(loc.phi + i, loc.v + j) +=
              -w * phi * (V.value(q, j, 0) * gNi[0] + V.value(q, j, 1) * gNi[1]);
        }
      }
      if (!flow) continue;

      const double a = darcy ? alpha(laws, phi) : 0.0;
      const double da = darcy ? alpha_prime(laws, phi) : 0.0;
      const double visc = ns ? eta(laws, phi) : 0.0;
      const double dvisc = ns ? eta_prime(laws, phi) : 0.0;
      // Symmetric gradient of v.
      const double Dv[2][2] = {{gv[0][0], 0.5 * (gv[0][1] + gv[1][0])},
                               {0.5 * (gv[0][1] + gv[1][0]), gv[1][1]}};
      // (v.grad) v
      const double conv[2] = {v[0] * gv[0][0] + v[1] * gv[0][1], v[0] * gv[1][0] + v[1] * gv[1][1]};

      // Velocity rows.
      for (int i = 0; i < nv; ++i) {
        const double Wi[2] = {V.value(q, i, 0), V.value(q, i, 1)};
        double gWi[2][2];
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) gWi[c][d] = V.grad(q, i, c, d);
        }
        const double DWi[2][2] = {{gWi[0][0], 0.5 * (gWi[0][1] + gWi[1][0])},
                                  {0.5 * (gWi[0][1] + gWi[1][0]), gWi[1][1]}};
        const double divWi = V.div(q, i);
        const double v_Wi = v[0] * Wi[0] + v[1] * Wi[1];
        const double gmu_Wi = gmu[0] * Wi[0] + gmu[1] * Wi[1];
        // (v.grad) W_i
        const double convWi[2] = {v[0] * gWi[0][0] + v[1] * gWi[0][1],
                                  v[0] * gWi[1][0] + v[1] * gWi[1][1]};
        const double Dv_DWi = Dv[0][0] * DWi[0][0] + 2.0 * Dv[0][1] * DWi[0][1] + Dv[1][1] * DWi[1][1];

        double r = -p * divWi + phi * gmu_Wi;
        if (darcy) r += a * v_Wi;
        if (ns) {
          r += ((v[0] - v_old[0]) * Wi[0] + (v[1] - v_old[1]) * Wi[1]) * inv_tau;
          r += 0.5 * (conv[0] * Wi[0] + conv[1] * Wi[1]) -
               0.5 * (convWi[0] * v[0] + convWi[1] * v[1]);
          r += visc * Dv_DWi;
        }
        R[loc.v + i] += w * r;
        if (!jacobian) continue;

        for (int j = 0; j < 3; ++j) {
          const double Nj = S.value(q, j);
          const double gNj_Wi = S.grad(q, j, 0, 0) * Wi[0] + S.grad(q, j, 0, 1) * Wi[1];
          double dphi = Nj * gmu_Wi;
          if (darcy) dphi += da * Nj * v_Wi;
          if (ns) dphi += dvisc * Nj * Dv_DWi;
          jac(loc.v + i, loc.phi + j) += w * dphi;
          jac(loc.v + i, loc.mu + j) += w * phi * gNj_Wi;
        }
        for (int j = 0; j < np; ++j) jac(loc.v + i, loc.p + j) += -w * P.value(q, j) * divWi;
        for (int j = 0; j < nv; ++j) {
          const double Wj[2] = {V.value(q, j, 0), V.value(q, j, 1)};
          const double Wj_Wi = Wj[0] * Wi[0] + Wj[1] * Wi[1];
          if (darcy) {
            jac(loc.v + i, loc.v + j) += w * a * Wj_Wi;
            continue;
          }
          double gWj[2][2];
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) gWj[c][d] = V.grad(q, j, c, d);
          }
          const double DWj01 = 0.5 * (gWj[0][1] + gWj[1][0]);
          const double DWj_DWi = gWj[0][0] * DWi[0][0] + 2.0 * DWj01 * DWi[0][1] + gWj[1][1] * DWi[1][1];
          // (W_j.grad) v + (v.grad) W_j, tested with W_i
          const double c1 = (Wj[0] * gv[0][0] + Wj[1] * gv[0][1] + v[0] * gWj[0][0] + v[1] * gWj[0][1]) * Wi[0] +
                            (Wj[0] * gv[1][0] + Wj[1] * gv[1][1] + v[0] * gWj[1][0] + v[1] * gWj[1][1]) * Wi[1];
          // (W_j.grad) W_i . v + (v.grad) W_i . W_j
          const double c2 = (Wj[0] * gWi[0][0] + Wj[1] * gWi[0][1]) * v[0] +
                            (Wj[0] * gWi[1][0] + Wj[1] * gWi[1][1]) * v[1] +
                            convWi[0] * Wj[0] + convWi[1] * Wj[1];
          jac(loc.v + i, loc.v + j) += w * (Wj_Wi * inv_tau + 0.5 * c1 - 0.5 * c2 + visc * DWj_DWi);
        }
      }

      // Pressure rows and the mean-value multiplier.
      for (int i = 0; i < np; ++i) {
        const double Qi = P.value(q, i);
        R[loc.p + i] += w * (divv + lambda) * Qi;
        if (!jacobian) continue;
        for (int j = 0; j < nv; ++j) jac(loc.p + i, loc.v + j) += w * V.div(q, j) * Qi;
        jac(loc.p + i, loc.lambda) += w * Qi;
        jac(loc.lambda, loc.p + i) += w * Qi;
      }
      R[loc.lambda] += w * p;
    }

    if (residual) {
      for (int i = 0; i < L; ++i) (*residual)[global[i]] += R[i];
    }
    if (jacobian) {
      for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
          if (coupled(scheme, block_of[i], block_of[j])) triplets.add(global[i], global[j], jac(i, j));
        }
      }
    }
  }
  if (jacobian) *jacobian = SparseMatrix::from_triplets(triplets);
}

std::vector<double> assemble_residual(const FormContext& ctx) {
  std::vector<double> r;
  assemble_system(ctx, &r, nullptr);
  return r;
}

SparseMatrix assemble_jacobian(const FormContext& ctx) {
  SparseMatrix a;
  assemble_system(ctx, nullptr, &a);
  return a;
}

double skew_form(const FieldVector& u, const FieldVector& v, const FieldVector& w,
                 const QuadratureRule& rule) {
  for (const FieldVector* f : {&u, &v, &w}) {
    if (!f->space || f->space->kind() != SpaceKind::P2C_VEC) {
      throw SpaceMismatch("skew_form expects P2C_VEC fields");
    }
  }
  if (u.space->mesh_ptr() != v.space->mesh_ptr() || u.space->mesh_ptr() != w.space->mesh_ptr()) {
    throw SpaceMismatch("skew_form fields live on different meshes");
  }
  const DofMap& space = *u.space;
  const Mesh& mesh = space.mesh();
  const Tabulation ref = tabulate_reference(SpaceKind::P2C_VEC, rule.points);
  Tabulation tab;
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry geo = mesh.geometry(t);
    push_forward(SpaceKind::P2C_VEC, ref, geo, space.element_signs(t), tab);
    const auto dofs = space.element_dofs(t);
    for (int q = 0; q < tab.num_points; ++q) {
      double uq[2] = {0, 0}, vq[2] = {0, 0}, wq[2] = {0, 0};
      double gv[2][2] = {{0, 0}, {0, 0}}, gw[2][2] = {{0, 0}, {0, 0}};
      for (int i = 0; i < tab.num_dofs; ++i) {
        const double cu = u.coefficients[dofs[i]];
        const double cv = v.coefficients[dofs[i]];
        const double cw = w.coefficients[dofs[i]];
        for (int c = 0; c < 2; ++c) {
          const double val = tab.value(q, i, c);
          uq[c] += cu * val;
          vq[c] += cv * val;
          wq[c] += cw * val;
          for (int d = 0; d < 2; ++d) {
            gv[c][d] += cv * tab.grad(q, i, c, d);
            gw[c][d] += cw * tab.grad(q, i, c, d);
          }
        }
      }
      double term = 0.0;
      for (int c = 0; c < 2; ++c) {
        const double ugv = uq[0] * gv[c][0] + uq[1] * gv[c][1];
        const double ugw = uq[0] * gw[c][0] + uq[1] * gw[c][1];
        term += 0.5 * ugv * wq[c] - 0.5 * ugw * vq[c];
      }
      total += rule.weights[q] * geo.det * term;
    }
  }
  return total;
}

namespace {

template <class Kernel>
SparseMatrix scalar_bilinear(const DofMap& space, const QuadratureRule& rule, Kernel kernel) {
  if (value_dim(space.kind()) != 1 || is_raviart_thomas(space.kind())) {
    throw SpaceMismatch("scalar bilinear form on " + to_string(space.kind()));
  }
  const int n = static_cast<int>(space.num_dofs());
  Triplets triplets(n, n);
  const Tabulation ref = tabulate_reference(space.kind(), rule.points);
  Tabulation tab;
  const Mesh& mesh = space.mesh();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry geo = mesh.geometry(t);
    push_forward(space.kind(), ref, geo, space.element_signs(t), tab);
    const auto dofs = space.element_dofs(t);
    for (int i = 0; i < tab.num_dofs; ++i) {
      for (int j = 0; j < tab.num_dofs; ++j) {
        double s = 0.0;
        for (int q = 0; q < tab.num_points; ++q) s += rule.weights[q] * geo.det * kernel(tab, q, i, j);
        triplets.add(dofs[i], dofs[j], s);
      }
    }
  }
  return SparseMatrix::from_triplets(triplets);
}

}  // namespace

SparseMatrix mass_matrix(const DofMap& space, const QuadratureRule& rule) {
  return scalar_bilinear(space, rule, [](const Tabulation& tab, int q, int i, int j) {
    return tab.value(q, i) * tab.value(q, j);
  });
}

SparseMatrix stiffness_matrix(const DofMap& space, const QuadratureRule& rule) {
  return scalar_bilinear(space, rule, [](const Tabulation& tab, int q, int i, int j) {
    return tab.grad(q, i, 0, 0) * tab.grad(q, j, 0, 0) + tab.grad(q, i, 0, 1) * tab.grad(q, j, 0, 1);
  });
}

}  // namespace phasefield
