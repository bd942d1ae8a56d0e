#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phasefield/assembly.hpp"
#include "phasefield/error.hpp"

using namespace phasefield;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Mesh> mesh(int n) {
  return std::make_shared<const Mesh>(Mesh::periodic_unit_square(n));
}

std::vector<double> random_vector(std::size_t n, unsigned seed, double lo, double hi) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

// Random iterate with phi near 0.4 and O(1) remaining blocks.
std::vector<double> random_iterate(const Discretization& disc, unsigned seed) {
  const BlockLayout& L = disc.layout();
  std::vector<double> x = random_vector(L.total, seed, -1.0, 1.0);
  for (int i = 0; i < L.num_scalar; ++i) x[L.phi + i] = 0.4 + 0.3 * x[L.phi + i];
  return x;
}

struct Problem {
  Discretization disc;
  MaterialLaws laws;
  double tau = 1e-3;
  std::vector<double> x, phi_old, v_old;
  FormContext ctx() const { return {disc, laws, tau, x, phi_old, v_old}; }
};

Problem random_problem(SchemeKind scheme, int darcy_order, unsigned seed) {
  Problem p{Discretization(mesh(2), scheme, darcy_order), {}, 1e-3, {}, {}, {}};
  p.x = random_iterate(p.disc, seed);
  p.phi_old = random_vector(p.disc.layout().num_scalar, seed + 1, 0.3, 0.5);
  p.v_old = random_vector(p.disc.layout().num_velocity, seed + 2, -1.0, 1.0);
  return p;
}

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("block layout sizes") {
  const auto m = mesh(3);
  const int n2 = 9;
  CHECK(Discretization(m, SchemeKind::CH).layout().total == 2 * n2);
  CHECK(Discretization(m, SchemeKind::CHD, 0).layout().total == 2 * n2 + 3 * n2 + 2 * n2 + 1);
  CHECK(Discretization(m, SchemeKind::CHD, 1).layout().total == 2 * n2 + 10 * n2 + 6 * n2 + 1);
  CHECK(Discretization(m, SchemeKind::CHNS).layout().total == 2 * n2 + 8 * n2 + n2 + 1);
  for (SchemeKind s : {SchemeKind::CH, SchemeKind::CHD, SchemeKind::CHNS}) {
    const Problem p = random_problem(s, 0, 1);
    const SparseMatrix J = assemble_jacobian(p.ctx());
    CHECK(J.rows() == p.disc.layout().total);
    CHECK(J.cols() == p.disc.layout().total);
    CHECK(assemble_residual(p.ctx()).size() == static_cast<std::size_t>(p.disc.layout().total));
  }
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme("ch") == SchemeKind::CH);
  CHECK(parse_scheme("CHD") == SchemeKind::CHD);
  CHECK(parse_scheme("chns") == SchemeKind::CHNS);
  CHECK_THROWS(parse_scheme("navier"));
  CHECK(to_string(SchemeKind::CHNS) == "chns");
}

TEST_CASE("constant states are fixed points of the residual") {
  for (SchemeKind s : {SchemeKind::CH, SchemeKind::CHD, SchemeKind::CHNS}) {
    for (double c : {0.0, 0.4, 0.93}) {
      Discretization disc(mesh(3), s);
      const BlockLayout& L = disc.layout();
      std::vector<double> x(L.total, 0.0);
      for (int i = 0; i < L.num_scalar; ++i) {
        x[L.phi + i] = c;
        x[L.mu + i] = double_well_prime(c);
      }
      const std::vector<double> phi_old(L.num_scalar, c);
      const std::vector<double> v_old(L.num_velocity, 0.0);
      const MaterialLaws laws;
      const FormContext ctx{disc, laws, 1e-3, x, phi_old, v_old};
      CHECK(norm_inf(assemble_residual(ctx)) <= 1e-13);
    }
  }
}

TEST_CASE("CH residual agrees with a dense element oracle on n = 2") {
  const auto m = mesh(2);
  Discretization disc(m, SchemeKind::CH);
  const MaterialLaws laws;
  const double tau = 1e-3;
  const int N = disc.layout().num_scalar;
  const std::vector<double> phi = random_vector(N, 17, 0.399, 0.401);
  const std::vector<double> mu = random_vector(N, 18, -1.0, 1.0);
  std::vector<double> x(2 * N);
  for (int i = 0; i < N; ++i) {
    x[i] = phi[i];
    x[N + i] = mu[i];
  }
  const FormContext ctx{disc, laws, tau, x, phi, {}};
  const std::vector<double> R = assemble_residual(ctx);

  // Dense oracle with barycentric coordinates built from the corners and a
  // different (higher) quadrature rule; every integrand is a polynomial of
  // degree at most 4.
  const QuadratureRule rule = quadrature(8);
  std::vector<double> oracle(2 * N, 0.0);
  for (std::size_t t = 0; t < m->num_triangles(); ++t) {
    const TriangleGeometry g = m->geometry(t);
    const auto& c = g.corners;
    const double area2 = (c[1].x - c[0].x) * (c[2].y - c[0].y) - (c[2].x - c[0].x) * (c[1].y - c[0].y);
    double grad[3][2];
    for (int k = 0; k < 3; ++k) {
      const Point& a = c[(k + 1) % 3];
      const Point& b = c[(k + 2) % 3];
      grad[k][0] = (a.y - b.y) / area2;
      grad[k][1] = (b.x - a.x) / area2;
    }
    const auto& tri = m->triangle(t);
    double gphi[2] = {0, 0}, gmu[2] = {0, 0};
    for (int k = 0; k < 3; ++k) {
      for (int d = 0; d < 2; ++d) {
        gphi[d] += phi[tri[k]] * grad[k][d];
        gmu[d] += mu[tri[k]] * grad[k][d];
      }
    }
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double xr = rule.points[q].x, yr = rule.points[q].y;
      const double lam[3] = {1 - xr - yr, xr, yr};
      double ph = 0.0;
      for (int k = 0; k < 3; ++k) ph += phi[tri[k]] * lam[k];
      const double w = rule.weights[q] * area2;
      const double m_q = laws.mobility_scale * ph * ph * (1 - ph) * (1 - ph) + laws.mobility_floor;
      const double fprime = ph * ph * ph - 1.5 * ph * ph + 0.5 * ph;
      double mu_q = 0.0;
      for (int k = 0; k < 3; ++k) mu_q += mu[tri[k]] * lam[k];
      for (int i = 0; i < 3; ++i) {
        const double gg_mu = gmu[0] * grad[i][0] + gmu[1] * grad[i][1];
        const double gg_phi = gphi[0] * grad[i][0] + gphi[1] * grad[i][1];
        oracle[tri[i]] += w * m_q * gg_mu;
        oracle[N + tri[i]] += w * (mu_q * lam[i] - laws.gamma * gg_phi - fprime * lam[i]);
      }
    }
  }
  for (int i = 0; i < 2 * N; ++i) CHECK(std::abs(R[i] - oracle[i]) <= 1e-12);
}

TEST_CASE("Jacobian matches central finite differences on n = 2") {
  struct Case {
    SchemeKind scheme;
    int order;
  };
  for (Case c : {Case{SchemeKind::CH, 0}, Case{SchemeKind::CHD, 0}, Case{SchemeKind::CHD, 1},
                 Case{SchemeKind::CHNS, 0}}) {
    Problem p = random_problem(c.scheme, c.order, 31);
    const SparseMatrix J = assemble_jacobian(p.ctx());
    const std::vector<double> d = random_vector(p.x.size(), 77, -1.0, 1.0);
    const std::vector<double> Jd = J.matvec(d);
    const double eps = 1e-6;
    const std::vector<double> x0 = p.x;
    for (std::size_t i = 0; i < x0.size(); ++i) p.x[i] = x0[i] + eps * d[i];
    const std::vector<double> rp = assemble_residual(p.ctx());
    for (std::size_t i = 0; i < x0.size(); ++i) p.x[i] = x0[i] - eps * d[i];
    const std::vector<double> rm = assemble_residual(p.ctx());
    std::vector<double> diff(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) diff[i] = (rp[i] - rm[i]) / (2 * eps) - Jd[i];
    CAPTURE(to_string(c.scheme));
    CHECK(norm_inf(diff) <= 1e-6 * norm_inf(Jd));
  }
}

TEST_CASE("Jacobian pattern does not depend on the iterate") {
  for (SchemeKind s : {SchemeKind::CH, SchemeKind::CHD, SchemeKind::CHNS}) {
    const Problem a = random_problem(s, 0, 1);
    Problem b = random_problem(s, 0, 2);
    std::fill(b.x.begin(), b.x.end(), 0.0);
    CHECK(assemble_jacobian(a.ctx()).same_pattern(assemble_jacobian(b.ctx())));
  }
}

TEST_CASE("mass and stiffness matrices") {
  for (int n : {2, 5}) {
    const auto m = mesh(n);
    const auto p1 = DofMap::build(m, SpaceKind::P1C);
    const QuadratureRule rule = quadrature(6);
    const SparseMatrix M = mass_matrix(*p1, rule);
    const SparseMatrix K = stiffness_matrix(*p1, rule);
    const std::vector<double> ones(p1->num_dofs(), 1.0);
    const std::vector<double> row_sums = M.matvec(ones);
    double total = 0.0;
    for (double r : row_sums) {
      CHECK(r == doctest::Approx(1.0 / (n * n)).epsilon(1e-13));
      total += r;
    }
    CHECK(std::abs(total - 1.0) <= 1e-13);
    CHECK(norm_inf(K.matvec(ones)) <= 1e-13);
  }
}

TEST_CASE("with constant mobility the phi-mu block is the stiffness matrix") {
  const auto m = mesh(3);
  Discretization disc(m, SchemeKind::CH);
  MaterialLaws laws;
  laws.mobility_scale = 1e-300;
  laws.mobility_floor = 1.0;
  const int N = disc.layout().num_scalar;
  const std::vector<double> x = random_iterate(disc, 4);
  const std::vector<double> phi_old(N, 0.4);
  for (double tau : {1e-3, 0.5}) {
    const FormContext ctx{disc, laws, tau, x, phi_old, {}};
    const SparseMatrix J = assemble_jacobian(ctx);
    const SparseMatrix K = stiffness_matrix(*disc.scalar_space(), disc.rule());
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) CHECK(std::abs(J.coeff(i, N + j) - K.coeff(i, j)) <= 1e-13);
    }
  }
}

TEST_CASE("convective and force couplings cancel") {
  for (SchemeKind s : {SchemeKind::CHD, SchemeKind::CHNS}) {
    for (int order : {0, 1}) {
      if (s == SchemeKind::CHNS && order == 1) continue;
      const Problem p = random_problem(s, order, 9);
      const BlockLayout& L = p.disc.layout();
      const SparseMatrix J = assemble_jacobian(p.ctx());
      const std::vector<double> mu = random_vector(L.num_scalar, 10, -1.0, 1.0);
      const std::vector<double> v = random_vector(L.num_velocity, 11, -1.0, 1.0);
      // mu^T J_{phi,v} v = -<phi v, grad mu>, v^T J_{v,mu} mu = <phi grad mu, v>.
      double convective = 0.0, force = 0.0, scale = 0.0;
      for (int i = 0; i < L.num_scalar; ++i) {
        for (int j = 0; j < L.num_velocity; ++j) {
          const double a = J.coeff(L.phi + i, L.velocity + j);
          const double b = J.coeff(L.velocity + j, L.mu + i);
          convective += mu[i] * a * v[j];
          force += v[j] * b * mu[i];
          scale = std::max(scale, std::abs(a));
          CHECK(std::abs(a + b) <= 1e-13 * (1.0 + std::abs(a)));
        }
      }
      CHECK(scale > 0.0);
      CHECK(std::abs(convective + force) <= 1e-13 * (1.0 + std::abs(force)));
    }
  }
}

TEST_CASE("skew-symmetric convection form") {
  const auto m = mesh(3);
  const auto space = DofMap::build(m, SpaceKind::P2C_VEC);
  const QuadratureRule rule = quadrature(6);
  const FieldVector u(space, random_vector(space->num_dofs(), 1, -1.0, 1.0));
  const FieldVector v(space, random_vector(space->num_dofs(), 2, -1.0, 1.0));
  const FieldVector w(space, random_vector(space->num_dofs(), 3, -1.0, 1.0));
  const double cuvw = skew_form(u, v, w, rule);
  const double scale = std::abs(cuvw) + 1.0;
  CHECK(std::abs(cuvw) > 1e-3);
  CHECK(std::abs(skew_form(u, v, v, rule)) <= 1e-13 * scale);
  CHECK(std::abs(cuvw + skew_form(u, w, v, rule)) <= 1e-13 * scale);

  const FieldVector s = interpolate(space, [](Point p) {
    return std::array<double, 2>{std::sin(2 * kPi * p.y), 0.0};
  });
  CHECK(std::abs(skew_form(s, s, s, rule)) <= 1e-13);

  const auto rt = DofMap::build(m, SpaceKind::RT0);
  const FieldVector r(rt);
  CHECK_THROWS_AS(skew_form(r, v, w, rule), SpaceMismatch);
}

TEST_CASE("iterate length is checked") {
  Discretization disc(mesh(2), SchemeKind::CH);
  const MaterialLaws laws;
  const std::vector<double> x(3, 0.0), phi_old(4, 0.0);
  const FormContext ctx{disc, laws, 1e-3, x, phi_old, {}};
  CHECK_THROWS_AS(assemble_residual(ctx), DimensionError);
}
