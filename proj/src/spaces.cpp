#include "phasefield/spaces.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "phasefield/error.hpp"
#include "phasefield/quadrature.hpp"

namespace phasefield {

namespace {

constexpr std::array<Point, 3> kRefVertices = {Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}};

// Value and Jacobian of one raw (monomial) RT function.
struct RawVector {
  double vx = 0, vy = 0;
  double dxx = 0, dxy = 0, dyx = 0, dyy = 0;  // d(v_x)/dx, d(v_x)/dy, ...
};

// RT1 = P1^2 + x * P1~; RT0 uses the first, fourth and the (x, y) function.
RawVector raw_rt(SpaceKind kind, int r, double x, double y) {
  if (kind == SpaceKind::RT0) {
    switch (r) {
      case 0: return {1, 0, 0, 0, 0, 0};
      case 1: return {0, 1, 0, 0, 0, 0};
      default: return {x, y, 1, 0, 0, 1};
    }
  }
  switch (r) {
    case 0: return {1, 0, 0, 0, 0, 0};
    case 1: return {x, 0, 1, 0, 0, 0};
    case 2: return {y, 0, 0, 1, 0, 0};
    case 3: return {0, 1, 0, 0, 0, 0};
    case 4: return {0, x, 0, 0, 1, 0};
    case 5: return {0, y, 0, 0, 0, 1};
    case 6: return {x * x, x * y, 2 * x, 0, y, x};
    default: return {x * y, y * y, y, x, 0, 2 * y};
  }
}

// Degrees of freedom of a vector function on the reference triangle, in
// local RT order: flux of each edge, first Legendre moment of each edge
// (RT1), then the two interior moments (RT1).
template <class Fn>
std::vector<double> rt_functionals(SpaceKind kind, const Fn& fn) {
  const int nd = dofs_per_element(kind);
  std::vector<double> dofs(nd, 0.0);
  const LineRule line = gauss_line(4);
  for (int k = 0; k < 3; ++k) {
    const Point a = kRefVertices[(k + 1) % 3];
    const Point b = kRefVertices[(k + 2) % 3];
    const double nx = b.y - a.y, ny = -(b.x - a.x);
    for (std::size_t q = 0; q < line.points.size(); ++q) {
      const double s = line.points[q];
      const auto v = fn(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y));
      const double flux = (v[0] * nx + v[1] * ny) * line.weights[q];
      dofs[k] += flux;
      if (kind == SpaceKind::RT1) dofs[3 + k] += flux * (2.0 * s - 1.0);
    }
  }
  if (kind == SpaceKind::RT1) {
    const QuadratureRule rule = quadrature(8);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto v = fn(rule.points[q].x, rule.points[q].y);
      dofs[6] += v[0] * rule.weights[q];
      dofs[7] += v[1] * rule.weights[q];
    }
  }
  return dofs;
}

// coefficients(r, j): weight of raw function r in the nodal basis function j.
Eigen::MatrixXd rt_coefficients(SpaceKind kind) {
  const int nd = dofs_per_element(kind);
  Eigen::MatrixXd dof_matrix(nd, nd);
  for (int r = 0; r < nd; ++r) {
    const auto col = rt_functionals(kind, [&](double x, double y) {
      const RawVector v = raw_rt(kind, r, x, y);
      return std::array<double, 2>{v.vx, v.vy};
    });
    for (int i = 0; i < nd; ++i) dof_matrix(i, r) = col[i];
  }
  return dof_matrix.inverse();
}

const Eigen::MatrixXd& rt_basis(SpaceKind kind) {
  static const Eigen::MatrixXd rt0 = rt_coefficients(SpaceKind::RT0);
  static const Eigen::MatrixXd rt1 = rt_coefficients(SpaceKind::RT1);
  return kind == SpaceKind::RT0 ? rt0 : rt1;
}

// Scalar Lagrange reference basis: value and reference gradient.
void lagrange_reference(SpaceKind kind, double x, double y, double* val, double* grad) {
  const double lam[3] = {1.0 - x - y, x, y};
  const double g[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  switch (kind) {
    case SpaceKind::P0_DISC:
      val[0] = 1.0;
      grad[0] = grad[1] = 0.0;
      return;
    case SpaceKind::P1C:
    case SpaceKind::P1_DISC:
      for (int i = 0; i < 3; ++i) {
        val[i] = lam[i];
        grad[2 * i] = g[i][0];
        grad[2 * i + 1] = g[i][1];
      }
      return;
    case SpaceKind::P2C:
    case SpaceKind::P2C_VEC:
      for (int i = 0; i < 3; ++i) {
        val[i] = lam[i] * (2.0 * lam[i] - 1.0);
        grad[2 * i] = (4.0 * lam[i] - 1.0) * g[i][0];
        grad[2 * i + 1] = (4.0 * lam[i] - 1.0) * g[i][1];
      }
      for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        val[3 + k] = 4.0 * lam[i] * lam[j];
        grad[2 * (3 + k)] = 4.0 * (lam[j] * g[i][0] + lam[i] * g[j][0]);
        grad[2 * (3 + k) + 1] = 4.0 * (lam[j] * g[i][1] + lam[i] * g[j][1]);
      }
      return;
    default:
      throw std::logic_error("not a Lagrange space");
  }
}

// Reference coordinates of the Lagrange nodes of a scalar space.
std::vector<Point> lagrange_nodes(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P0_DISC:
      return {{1.0 / 3.0, 1.0 / 3.0}};
    case SpaceKind::P1C:
    case SpaceKind::P1_DISC:
      return {kRefVertices.begin(), kRefVertices.end()};
    case SpaceKind::P2C:
    case SpaceKind::P2C_VEC:
      return {kRefVertices[0], kRefVertices[1], kRefVertices[2],
              {0.5, 0.5}, {0.0, 0.5}, {0.5, 0.0}};
    default:
      throw std::logic_error("not a Lagrange space");
  }
}

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P1C: return "P1C";
    case SpaceKind::P2C: return "P2C";
    case SpaceKind::P2C_VEC: return "P2C_VEC";
    case SpaceKind::P0_DISC: return "P0_DISC";
    case SpaceKind::P1_DISC: return "P1_DISC";
    case SpaceKind::RT0: return "RT0";
    case SpaceKind::RT1: return "RT1";
  }
  return "?";
}

int value_dim(SpaceKind kind) {
  return (kind == SpaceKind::P2C_VEC || is_raviart_thomas(kind)) ? 2 : 1;
}

bool is_raviart_thomas(SpaceKind kind) { return kind == SpaceKind::RT0 || kind == SpaceKind::RT1; }

int dofs_per_element(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P1C: return 3;
    case SpaceKind::P2C: return 6;
    case SpaceKind::P2C_VEC: return 12;
    case SpaceKind::P0_DISC: return 1;
    case SpaceKind::P1_DISC: return 3;
    case SpaceKind::RT0: return 3;
    case SpaceKind::RT1: return 8;
  }
  return 0;
}

std::shared_ptr<const DofMap> DofMap::build(std::shared_ptr<const Mesh> mesh, SpaceKind kind) {
  if (!mesh) throw std::invalid_argument("DofMap::build: null mesh");
  auto map = std::shared_ptr<DofMap>(new DofMap());
  map->kind_ = kind;
  map->mesh_ = mesh;
  map->per_element_ = phasefield::dofs_per_element(kind);

  const std::size_t nv = mesh->num_vertices();
  const std::size_t ne = mesh->num_edges();
  const std::size_t nt = mesh->num_triangles();
  const int pe = map->per_element_;
  map->dofs_.resize(nt * pe);
  map->signs_.assign(nt * pe, 1.0);

  for (std::size_t t = 0; t < nt; ++t) {
    int* d = map->dofs_.data() + t * pe;
    double* s = map->signs_.data() + t * pe;
    const auto& tri = mesh->triangle(t);
    const auto& edges = mesh->triangle_edges(t);
    const auto& esign = mesh->triangle_edge_signs(t);
    switch (kind) {
      case SpaceKind::P1C:
        for (int i = 0; i < 3; ++i) d[i] = tri[i];
        break;
      case SpaceKind::P2C:
      case SpaceKind::P2C_VEC:
        for (int i = 0; i < 3; ++i) {
          d[i] = tri[i];
          d[3 + i] = static_cast<int>(nv) + edges[i];
        }
        if (kind == SpaceKind::P2C_VEC) {
          const int offset = static_cast<int>(nv + ne);
          for (int i = 0; i < 6; ++i) d[6 + i] = d[i] + offset;
        }
        break;
      case SpaceKind::P0_DISC:
        d[0] = static_cast<int>(t);
        break;
      case SpaceKind::P1_DISC:
        for (int i = 0; i < 3; ++i) d[i] = static_cast<int>(3 * t) + i;
        break;
      case SpaceKind::RT0:
        for (int i = 0; i < 3; ++i) {
          d[i] = edges[i];
          s[i] = esign[i];
        }
        break;
      case SpaceKind::RT1:
        // Reversing an edge flips its normal and its Legendre parameter, so
        // the first-moment dof keeps its sign.
        for (int i = 0; i < 3; ++i) {
          d[i] = 2 * edges[i];
          s[i] = esign[i];
          d[3 + i] = 2 * edges[i] + 1;
        }
        d[6] = static_cast<int>(2 * ne + 2 * t);
        d[7] = d[6] + 1;
        break;
    }
  }

  switch (kind) {
    case SpaceKind::P1C: map->num_dofs_ = nv; break;
    case SpaceKind::P2C: map->num_dofs_ = nv + ne; break;
    case SpaceKind::P2C_VEC: map->num_dofs_ = 2 * (nv + ne); break;
    case SpaceKind::P0_DISC: map->num_dofs_ = nt; break;
    case SpaceKind::P1_DISC: map->num_dofs_ = 3 * nt; break;
    case SpaceKind::RT0: map->num_dofs_ = ne; break;
    case SpaceKind::RT1: map->num_dofs_ = 2 * ne + 2 * nt; break;
  }
  return map;
}

void Tabulation::resize(int points, int dofs, int value_dim) {
  num_points = points;
  num_dofs = dofs;
  dim = value_dim;
  values.assign(static_cast<std::size_t>(points) * dofs * value_dim, 0.0);
  gradients.assign(static_cast<std::size_t>(points) * dofs * value_dim * 2, 0.0);
  if (value_dim == 2) {
    divergences.assign(static_cast<std::size_t>(points) * dofs, 0.0);
  } else {
    divergences.clear();
  }
}

Tabulation tabulate_reference(SpaceKind kind, std::span<const Point> points) {
  Tabulation tab;
  const int nd = dofs_per_element(kind);
  const int np = static_cast<int>(points.size());
  tab.resize(np, nd, value_dim(kind));

  if (is_raviart_thomas(kind)) {
    const Eigen::MatrixXd& coeff = rt_basis(kind);
    for (int q = 0; q < np; ++q) {
      for (int r = 0; r < nd; ++r) {
        const RawVector v = raw_rt(kind, r, points[q].x, points[q].y);
        for (int j = 0; j < nd; ++j) {
          const double c = coeff(r, j);
          if (c == 0.0) continue;
          const int base = q * nd + j;
          tab.values[2 * base] += c * v.vx;
          tab.values[2 * base + 1] += c * v.vy;
          tab.gradients[4 * base + 0] += c * v.dxx;
          tab.gradients[4 * base + 1] += c * v.dxy;
          tab.gradients[4 * base + 2] += c * v.dyx;
          tab.gradients[4 * base + 3] += c * v.dyy;
          tab.divergences[base] += c * (v.dxx + v.dyy);
        }
      }
    }
    return tab;
  }

  const bool vector = kind == SpaceKind::P2C_VEC;
  const int ns = vector ? 6 : nd;
  std::array<double, 6> val{};
  std::array<double, 12> grad{};
  for (int q = 0; q < np; ++q) {
    lagrange_reference(kind, points[q].x, points[q].y, val.data(), grad.data());
    for (int i = 0; i < ns; ++i) {
      if (!vector) {
        tab.values[q * nd + i] = val[i];
        tab.gradients[2 * (q * nd + i)] = grad[2 * i];
        tab.gradients[2 * (q * nd + i) + 1] = grad[2 * i + 1];
        continue;
      }
      for (int c = 0; c < 2; ++c) {
        const int j = c * 6 + i;
        tab.values[(q * nd + j) * 2 + c] = val[i];
        tab.gradients[((q * nd + j) * 2 + c) * 2 + 0] = grad[2 * i];
        tab.gradients[((q * nd + j) * 2 + c) * 2 + 1] = grad[2 * i + 1];
        tab.divergences[q * nd + j] = grad[2 * i + c];
      }
    }
  }
  return tab;
}

void push_forward(SpaceKind kind, const Tabulation& ref, const TriangleGeometry& geo,
                  std::span<const double> signs, Tabulation& out) {
  if (out.num_points != ref.num_points || out.num_dofs != ref.num_dofs || out.dim != ref.dim) {
    out.resize(ref.num_points, ref.num_dofs, ref.dim);
  }
  const auto& J = geo.jacobian;
  const auto& inv = geo.inverse;
  const int nd = ref.num_dofs;
  const int dim = ref.dim;

  if (is_raviart_thomas(kind)) {
    const double scale = 1.0 / geo.det;
    for (int q = 0; q < ref.num_points; ++q) {
      for (int i = 0; i < nd; ++i) {
        const int base = q * nd + i;
        const double s = signs[i] * scale;
        const double vx = ref.values[2 * base], vy = ref.values[2 * base + 1];
        out.values[2 * base] = s * (J[0][0] * vx + J[0][1] * vy);
        out.values[2 * base + 1] = s * (J[1][0] * vx + J[1][1] * vy);
        const double* g = &ref.gradients[4 * base];
        // J * G * J^{-1}
        double jg[2][2];
        for (int c = 0; c < 2; ++c) {
          for (int e = 0; e < 2; ++e) jg[c][e] = J[c][0] * g[0 * 2 + e] + J[c][1] * g[1 * 2 + e];
        }
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            out.gradients[4 * base + 2 * c + d] = s * (jg[c][0] * inv[0][d] + jg[c][1] * inv[1][d]);
          }
        }
        out.divergences[base] = s * ref.divergences[base];
      }
    }
    return;
  }

  for (int q = 0; q < ref.num_points; ++q) {
    for (int i = 0; i < nd; ++i) {
      const double s = signs[i];
      for (int c = 0; c < dim; ++c) {
        const int vi = (q * nd + i) * dim + c;
        out.values[vi] = s * ref.values[vi];
        const double gx = ref.gradients[2 * vi], gy = ref.gradients[2 * vi + 1];
        out.gradients[2 * vi] = s * (inv[0][0] * gx + inv[1][0] * gy);
        out.gradients[2 * vi + 1] = s * (inv[0][1] * gx + inv[1][1] * gy);
      }
      if (dim == 2) {
        out.divergences[q * nd + i] =
            out.gradients[((q * nd + i) * 2 + 0) * 2 + 0] + out.gradients[((q * nd + i) * 2 + 1) * 2 + 1];
      }
    }
  }
}

Tabulation eval_basis(const DofMap& space, std::size_t t, std::span<const Point> points) {
  const TriangleGeometry geo = space.mesh().geometry(t);
  const Tabulation ref = tabulate_reference(space.kind(), points);
  Tabulation out;
  push_forward(space.kind(), ref, geo, space.element_signs(t), out);
  return out;
}

FieldVector::FieldVector(std::shared_ptr<const DofMap> s, std::vector<double> c)
    : space(std::move(s)), coefficients(std::move(c)) {
  if (coefficients.size() != space->num_dofs()) {
    throw DimensionError("field has " + std::to_string(coefficients.size()) +
                         " coefficients, space " + to_string(space->kind()) + " has " +
                         std::to_string(space->num_dofs()) + " dofs");
  }
}

FieldVector interpolate(std::shared_ptr<const DofMap> space, const ScalarFunction& fn) {
  if (value_dim(space->kind()) != 1) {
    throw SpaceMismatch("scalar interpolation into vector space " + to_string(space->kind()));
  }
  FieldVector field(space);
  const auto nodes = lagrange_nodes(space->kind());
  const Mesh& mesh = space->mesh();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry geo = mesh.geometry(t);
    const auto dofs = space->element_dofs(t);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      field.coefficients[dofs[i]] = fn(geo.map(nodes[i].x, nodes[i].y));
    }
  }
  return field;
}

FieldVector interpolate(std::shared_ptr<const DofMap> space, const VectorFunction& fn) {
  const SpaceKind kind = space->kind();
  if (value_dim(kind) != 2) {
    throw SpaceMismatch("vector interpolation into scalar space " + to_string(kind));
  }
  FieldVector field(space);
  const Mesh& mesh = space->mesh();
  if (kind == SpaceKind::P2C_VEC) {
    const auto nodes = lagrange_nodes(kind);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const TriangleGeometry geo = mesh.geometry(t);
      const auto dofs = space->element_dofs(t);
      for (int i = 0; i < 6; ++i) {
        const auto v = fn(geo.map(nodes[i].x, nodes[i].y));
        field.coefficients[dofs[i]] = v[0];
        field.coefficients[dofs[6 + i]] = v[1];
      }
    }
    return field;
  }
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry geo = mesh.geometry(t);
    const auto& inv = geo.inverse;
    // Contravariant pullback: vhat = det * J^{-1} v(F(xhat)).
    const auto local = rt_functionals(kind, [&](double x, double y) {
      const auto v = fn(geo.map(x, y));
      return std::array<double, 2>{geo.det * (inv[0][0] * v[0] + inv[0][1] * v[1]),
                                   geo.det * (inv[1][0] * v[0] + inv[1][1] * v[1])};
    });
    const auto dofs = space->element_dofs(t);
    const auto signs = space->element_signs(t);
    for (std::size_t i = 0; i < local.size(); ++i) field.coefficients[dofs[i]] = signs[i] * local[i];
  }
  return field;
}

std::vector<std::array<double, 2>> evaluate(const FieldVector& field, std::size_t t,
                                            std::span<const Point> points) {
  const DofMap& space = *field.space;
  const Tabulation tab = eval_basis(space, t, points);
  const auto dofs = space.element_dofs(t);
  std::vector<std::array<double, 2>> out(points.size(), {0.0, 0.0});
  for (int q = 0; q < tab.num_points; ++q) {
    for (int i = 0; i < tab.num_dofs; ++i) {
      const double c = field.coefficients[dofs[i]];
      for (int d = 0; d < tab.dim; ++d) out[q][d] += c * tab.value(q, i, d);
    }
  }
  return out;
}

}  // namespace phasefield
