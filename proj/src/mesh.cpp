#include "phasefield/mesh.hpp"

#include <cmath>
#include <string>

#include "phasefield/error.hpp"

namespace phasefield {

namespace {

enum EdgeType { kHorizontal = 0, kVertical = 1, kDiagonal = 2 };

}  // namespace

Mesh Mesh::periodic_unit_square(int n) {
  if (n < 2) {
    throw InvalidMeshSize("periodic mesh needs n >= 2, got " + std::to_string(n));
  }
  Mesh mesh;
  mesh.n_ = n;
  const auto nn = static_cast<std::size_t>(n) * n;
  const double h = 1.0 / n;

  auto vid = [n](int i, int j) { return (i % n) + n * (j % n); };
  auto wrap = [n](int i) { return i >= n ? 1 : 0; };
  auto eid = [n](int i, int j, EdgeType type) { return 3 * ((i % n) + n * (j % n)) + type; };

  mesh.vertices_.resize(nn);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.vertices_[vid(i, j)] = {i * h, j * h};
    }
  }

  mesh.edges_.resize(3 * nn);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j);
      const std::array<int, 3> other = {vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)};
      for (int type = 0; type < 3; ++type) {
        const int b = other[type];
        mesh.edges_[eid(i, j, static_cast<EdgeType>(type))].v =
            a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a};
      }
    }
  }

  mesh.triangles_.reserve(2 * nn);
  mesh.triangle_edges_.reserve(2 * nn);
  mesh.shifts_.reserve(2 * nn);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      const std::array<int, 2> s00{0, 0}, s10{wrap(i + 1), 0};
      const std::array<int, 2> s01{0, wrap(j + 1)}, s11{wrap(i + 1), wrap(j + 1)};

      mesh.triangles_.push_back({v00, v10, v11});
      mesh.triangle_edges_.push_back(
          {eid(i + 1, j, kVertical), eid(i, j, kDiagonal), eid(i, j, kHorizontal)});
      mesh.shifts_.push_back({s00, s10, s11});

      mesh.triangles_.push_back({v00, v11, v01});
      mesh.triangle_edges_.push_back(
          {eid(i, j + 1, kHorizontal), eid(i, j, kVertical), eid(i, j, kDiagonal)});
      mesh.shifts_.push_back({s00, s11, s01});
    }
  }

  mesh.edge_signs_.resize(mesh.triangles_.size());
  for (std::size_t t = 0; t < mesh.triangles_.size(); ++t) {
    const auto& tri = mesh.triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int from = tri[(k + 1) % 3];
      const auto& e = mesh.edges_[mesh.triangle_edges_[t][k]];
      mesh.edge_signs_[t][k] = from == e.v[0] ? 1 : -1;
    }
  }
  return mesh;
}

TriangleGeometry Mesh::geometry(std::size_t t) const {
  if (t >= triangles_.size()) {
    throw IndexError("triangle index " + std::to_string(t) + " out of range [0, " +
                     std::to_string(triangles_.size()) + ")");
  }
  TriangleGeometry g;
  for (int k = 0; k < 3; ++k) {
    const Point& p = vertices_[triangles_[t][k]];
    g.corners[k] = {p.x + shifts_[t][k][0], p.y + shifts_[t][k][1]};
  }
  const auto& c = g.corners;
  g.jacobian = {{{c[1].x - c[0].x, c[2].x - c[0].x}, {c[1].y - c[0].y, c[2].y - c[0].y}}};
  g.det = g.jacobian[0][0] * g.jacobian[1][1] - g.jacobian[0][1] * g.jacobian[1][0];
  g.area = 0.5 * g.det;
  const double inv = 1.0 / g.det;
  g.inverse = {{{g.jacobian[1][1] * inv, -g.jacobian[0][1] * inv},
                {-g.jacobian[1][0] * inv, g.jacobian[0][0] * inv}}};
  return g;
}

double Mesh::h_max() const { return std::sqrt(2.0) / n_; }

}  // namespace phasefield
