#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "phasefield/mesh.hpp"

namespace phasefield {

enum class SpaceKind { P1C, P2C, P2C_VEC, P0_DISC, P1_DISC, RT0, RT1 };

std::string to_string(SpaceKind kind);
/// 1 for scalar spaces, 2 for vector-valued ones.
int value_dim(SpaceKind kind);
int dofs_per_element(SpaceKind kind);
bool is_raviart_thomas(SpaceKind kind);

/// Degree-of-freedom layout of one finite-element space on a periodic mesh.
///
/// Global numbering:
///   P1C      vertex index
///   P2C      vertices, then n^2 + edge index
///   P2C_VEC  all x-components (P2C numbering), then all y-components
///   P0_DISC  triangle index
///   P1_DISC  3*t + local vertex
///   RT0      edge index; the basis carries the global edge normal
///   RT1      2*edge (flux), 2*edge+1 (first moment), then 6n^2 + 2*t + {0,1}
///            for the two interior moments
/// The global normal of an edge is its direction v[0] -> v[1] rotated clockwise.
class DofMap {
 public:
  static std::shared_ptr<const DofMap> build(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  std::size_t num_dofs() const { return num_dofs_; }
  int dofs_per_element() const { return per_element_; }

  std::span<const int> element_dofs(std::size_t t) const {
    return {dofs_.data() + t * per_element_, static_cast<std::size_t>(per_element_)};
  }
  /// Orientation factor applied to each local basis function (RT only,
  /// 1 elsewhere).
  std::span<const double> element_signs(std::size_t t) const {
    return {signs_.data() + t * per_element_, static_cast<std::size_t>(per_element_)};
  }

 private:
  DofMap() = default;

  SpaceKind kind_ = SpaceKind::P1C;
  std::shared_ptr<const Mesh> mesh_;
  std::size_t num_dofs_ = 0;
  int per_element_ = 0;
  std::vector<int> dofs_;
  std::vector<double> signs_;
};

/// Basis values on one element at a set of points.
///
/// values(q, i, c), grad(q, i, c, d) = d(phi_i)_c / dx_d, div(q, i) for
/// vector-valued spaces. Reference tabulations hold reference derivatives.
struct Tabulation {
  int num_points = 0;
  int num_dofs = 0;
  int dim = 1;
  std::vector<double> values;
  std::vector<double> gradients;
  std::vector<double> divergences;

  void resize(int points, int dofs, int value_dim);

  double value(int q, int i, int c = 0) const { return values[(q * num_dofs + i) * dim + c]; }
  double grad(int q, int i, int c, int d) const {
    return gradients[((q * num_dofs + i) * dim + c) * 2 + d];
  }
  double div(int q, int i) const { return divergences[q * num_dofs + i]; }
};

Tabulation tabulate_reference(SpaceKind kind, std::span<const Point> points);

/// Maps a reference tabulation to element `geo`: affine pullback for Lagrange
/// spaces, contravariant Piola for RT. `signs` come from DofMap::element_signs.
void push_forward(SpaceKind kind, const Tabulation& reference, const TriangleGeometry& geo,
                  std::span<const double> signs, Tabulation& out);

Tabulation eval_basis(const DofMap& space, std::size_t t, std::span<const Point> points);

/// Coefficient vector of a discrete field.
struct FieldVector {
  std::shared_ptr<const DofMap> space;
  std::vector<double> coefficients;

  FieldVector() = default;
  explicit FieldVector(std::shared_ptr<const DofMap> s)
      : space(std::move(s)), coefficients(space->num_dofs(), 0.0) {}
  FieldVector(std::shared_ptr<const DofMap> s, std::vector<double> c);

  std::size_t size() const { return coefficients.size(); }
};

using ScalarFunction = std::function<double(Point)>;
using VectorFunction = std::function<std::array<double, 2>(Point)>;

/// Nodal interpolation for Lagrange spaces. The function must be 1-periodic
/// for continuous spaces; this is not checked.
FieldVector interpolate(std::shared_ptr<const DofMap> space, const ScalarFunction& fn);
/// Nodal interpolation for P2C_VEC, edge/interior moment interpolation for RT.
FieldVector interpolate(std::shared_ptr<const DofMap> space, const VectorFunction& fn);

/// Evaluates a field on element t at reference points (values only).
std::vector<std::array<double, 2>> evaluate(const FieldVector& field, std::size_t t,
                                            std::span<const Point> points);

}  // namespace phasefield
