#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "phasefield/la.hpp"
#include "phasefield/mesh.hpp"
#include "phasefield/physics.hpp"
#include "phasefield/quadrature.hpp"
#include "phasefield/spaces.hpp"

namespace phasefield {

enum class SchemeKind { CH, CHD, CHNS };

std::string to_string(SchemeKind kind);
/// Parses "ch", "chd" or "chns" (case-insensitive).
SchemeKind parse_scheme(const std::string& name);

/// Offsets of the solution blocks inside the coupled unknown vector, ordered
/// (phi, mu[, v, p, lambda]). lambda is the multiplier enforcing <p, 1> = 0.
/// Absent blocks have offset -1.
struct BlockLayout {
  int phi = 0;
  int mu = 0;
  int velocity = -1;
  int pressure = -1;
  int multiplier = -1;
  int num_scalar = 0;
  int num_velocity = 0;
  int num_pressure = 0;
  int total = 0;

  bool has_flow() const { return velocity >= 0; }
};

/// Basis tabulations of every active space on one element.
struct ElementBasis {
  TriangleGeometry geometry;
  Tabulation scalar;
  Tabulation velocity;
  Tabulation pressure;
};

/// Mesh, spaces, quadrature and block layout of one scheme. Assembly and
/// diagnostics share a single instance so they integrate with the same rule.
///
/// Spaces: phi, mu in P1C. CHD: v in RT_k, p in P_k discontinuous.
/// CHNS: v in P2C_VEC, p in P1C (Taylor-Hood).
class Discretization {
 public:
  Discretization(std::shared_ptr<const Mesh> mesh, SchemeKind scheme, int darcy_order = 0,
                 int quad_degree = 6);

  SchemeKind scheme() const { return scheme_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const std::shared_ptr<const DofMap>& scalar_space() const { return scalar_; }
  /// Null for CH.
  const std::shared_ptr<const DofMap>& velocity_space() const { return velocity_; }
  const std::shared_ptr<const DofMap>& pressure_space() const { return pressure_; }
  const QuadratureRule& rule() const { return rule_; }
  const BlockLayout& layout() const { return layout_; }

  void element_basis(std::size_t t, ElementBasis& out) const;

 private:
  SchemeKind scheme_;
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const DofMap> scalar_;
  std::shared_ptr<const DofMap> velocity_;
  std::shared_ptr<const DofMap> pressure_;
  QuadratureRule rule_;
  BlockLayout layout_;
  Tabulation ref_scalar_;
  Tabulation ref_velocity_;
  Tabulation ref_pressure_;
};

/// Inputs of one nonlinear residual evaluation.
struct FormContext {
  const Discretization& disc;
  const MaterialLaws& laws;
  double tau;
  std::span<const double> iterate;       // coupled vector at the new level
  std::span<const double> phi_old;       // P1C coefficients at the old level
  std::span<const double> velocity_old;  // CHNS only
};

/// Block residual of the fully implicit scheme at the current iterate.
std::vector<double> assemble_residual(const FormContext& ctx);
/// Exact Jacobian of assemble_residual. The sparsity pattern depends only on
/// the discretization.
SparseMatrix assemble_jacobian(const FormContext& ctx);
/// Both at once; either output may be null.
void assemble_system(const FormContext& ctx, std::vector<double>* residual,
                     SparseMatrix* jacobian);

/// c(u, v, w) = 1/2 <(u.grad) v, w> - 1/2 <(u.grad) w, v> for P2C_VEC fields.
double skew_form(const FieldVector& u, const FieldVector& v, const FieldVector& w,
                 const QuadratureRule& rule);

/// Consistent mass and stiffness matrices of a scalar Lagrange space.
SparseMatrix mass_matrix(const DofMap& space, const QuadratureRule& rule);
SparseMatrix stiffness_matrix(const DofMap& space, const QuadratureRule& rule);

}  // namespace phasefield
