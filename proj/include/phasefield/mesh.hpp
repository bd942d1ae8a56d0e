#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace phasefield {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Affine map x = corners[0] + jacobian * xref of one triangle, with its
/// physical corners already unwrapped across the periodic seam.
struct TriangleGeometry {
  std::array<Point, 3> corners;
  double area = 0.0;
  std::array<std::array<double, 2>, 2> jacobian{};      // J[row][col]
  std::array<std::array<double, 2>, 2> inverse{};       // J^{-1}
  double det = 0.0;

  Point map(double xr, double yr) const {
    return {corners[0].x + jacobian[0][0] * xr + jacobian[0][1] * yr,
            corners[0].y + jacobian[1][0] * xr + jacobian[1][1] * yr};
  }
};

/// Edge between two distinct torus vertices, oriented from v[0] to v[1]
/// with v[0] < v[1].
struct Edge {
  std::array<int, 2> v{};
};

/// Uniform periodic triangulation of the unit square (a flat torus).
///
/// Every grid square (i, j) is cut along its bottom-left to top-right diagonal
/// into a lower triangle (v00, v10, v11) and an upper triangle (v00, v11, v01),
/// both counterclockwise. Vertex (i, j) has index i + n*j. Local edge k of a
/// triangle is the edge opposite local vertex k; its local traversal runs from
/// vertex (k+1)%3 to (k+2)%3.
///
/// Edges are identified structurally rather than by their vertex pair: for
/// n = 2 two different edges can join the same two torus vertices.
class Mesh {
 public:
  /// Throws InvalidMeshSize for n < 2.
  static Mesh periodic_unit_square(int n);

  int n() const { return n_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::array<int, 3>& triangle(std::size_t t) const { return triangles_[t]; }
  const std::array<int, 3>& triangle_edges(std::size_t t) const { return triangle_edges_[t]; }
  /// +1 when the local traversal of edge k agrees with the global edge
  /// direction, -1 otherwise.
  const std::array<int, 3>& triangle_edge_signs(std::size_t t) const { return edge_signs_[t]; }
  /// Periodic wrap offset (in cell-multiples of the unit square) of corner k.
  const std::array<int, 2>& shift(std::size_t t, int k) const { return shifts_[t][k]; }

  /// Throws IndexError for t out of range.
  TriangleGeometry geometry(std::size_t t) const;

  double h_max() const;

 private:
  Mesh() = default;

  int n_ = 0;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 3>> edge_signs_;
  std::vector<std::array<std::array<int, 2>, 3>> shifts_;
};

}  // namespace phasefield
