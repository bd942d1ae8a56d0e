#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "phasefield/app.hpp"
#include "phasefield/schemes.hpp"

using namespace phasefield;

namespace {

FieldVector constant(const std::shared_ptr<const DofMap>& s, double c) {
  return interpolate(s, [c](Point) { return c; });
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("CH constant state is a fixed point") {
  SchemeConfig config;
  config.n = 8;
  Stepper stepper(config);
  const SchemeState s0 = stepper.initial_state(constant(stepper.discretization().scalar_space(), 0.4));
  const auto [s1, report] = stepper.step(s0);
  CHECK(report.converged);
  CHECK(report.iterations <= 2);
  CHECK(max_abs_diff(s1.phi.coefficients, s0.phi.coefficients) <= 1e-13);
  CHECK(s1.step == 1);
  CHECK(s1.time == doctest::Approx(1e-3));
}

TEST_CASE("CHNS quiescent state is a fixed point") {
  SchemeConfig config;
  config.scheme = SchemeKind::CHNS;
  config.n = 4;
  Stepper stepper(config);
  const SchemeState s0 = stepper.initial_state(constant(stepper.discretization().scalar_space(), 0.4));
  const auto [s1, report] = stepper.step(s0);
  CHECK(report.converged);
  CHECK(max_abs_diff(s1.phi.coefficients, s0.phi.coefficients) <= 1e-13);
  CHECK(max_abs(s1.velocity.coefficients) <= 1e-13);
  CHECK(max_abs(s1.pressure.coefficients) <= 1e-13);
}

TEST_CASE("CHD constant state is a fixed point") {
  for (int order : {0, 1}) {
    SchemeConfig config;
    config.scheme = SchemeKind::CHD;
    config.darcy_order = order;
    config.n = 4;
    Stepper stepper(config);
    const SchemeState s0 = stepper.initial_state(constant(stepper.discretization().scalar_space(), 0.7));
    const auto [s1, report] = stepper.step(s0);
    CHECK(report.converged);
    CHECK(max_abs_diff(s1.phi.coefficients, s0.phi.coefficients) <= 1e-13);
    CHECK(max_abs(s1.velocity.coefficients) <= 1e-13);
  }
}

TEST_CASE("one CH step conserves mass and satisfies the energy balance") {
  SchemeConfig config;
  config.n = 16;
  Stepper stepper(config);
  const Discretization& disc = stepper.discretization();
  const SchemeState s0 = stepper.initial_state(initial_phi(11, disc.scalar_space()));
  const auto [s1, report] = stepper.step(s0);
  CHECK(report.converged);
  CHECK(report.residual <= config.newton_tol);
  const double m0 = mass(disc, s0.phi);
  CHECK(std::abs(mass(disc, s1.phi) - m0) <= 1e-13 * (1 + std::abs(m0)));
  CHECK(balance_residual(disc, config.laws, config.tau, s0, s1) <= 1e-10);
}

TEST_CASE("converged Newton iterates satisfy every block equation") {
  for (SchemeKind s : {SchemeKind::CH, SchemeKind::CHD, SchemeKind::CHNS}) {
    SchemeConfig config;
    config.scheme = s;
    config.n = 6;
    Stepper stepper(config);
    const Discretization& disc = stepper.discretization();
    const SchemeState s0 = stepper.initial_state(initial_phi(2, disc.scalar_space()));
    const auto [s1, report] = stepper.step(s0);
    // Converged fields in the coupled layout; the multiplier vanishes at a
    // solution because <div v, 1> = 0 on the torus.
    const BlockLayout& L = disc.layout();
    std::vector<double> x(L.total, 0.0);
    std::copy(s1.phi.coefficients.begin(), s1.phi.coefficients.end(), x.begin() + L.phi);
    std::copy(s1.mu.coefficients.begin(), s1.mu.coefficients.end(), x.begin() + L.mu);
    if (L.has_flow()) {
      std::copy(s1.velocity.coefficients.begin(), s1.velocity.coefficients.end(), x.begin() + L.velocity);
      std::copy(s1.pressure.coefficients.begin(), s1.pressure.coefficients.end(), x.begin() + L.pressure);
    }
    const FormContext ctx{disc, config.laws, config.tau, x, s0.phi.coefficients, s0.velocity.coefficients};
    CHECK(max_abs(assemble_residual(ctx)) <= config.newton_tol);
  }
}

TEST_CASE("pack gives the Newton initial guess") {
  SchemeConfig config;
  config.scheme = SchemeKind::CHD;
  config.n = 4;
  Stepper stepper(config);
  const Discretization& disc = stepper.discretization();
  const SchemeState s0 = stepper.initial_state(initial_phi(2, disc.scalar_space()));
  const auto [s1, report] = stepper.step(s0);
  const std::vector<double> x = stepper.pack(s1);
  const BlockLayout& L = disc.layout();
  for (int i = 0; i < L.num_scalar; ++i) CHECK(x[L.phi + i] == s1.phi.coefficients[i]);
  for (int i = L.velocity; i < L.total; ++i) CHECK(x[i] == 0.0);
}

TEST_CASE("run reports every step") {
  SchemeConfig config;
  config.n = 16;
  config.final_time = 0.01;
  Stepper stepper(config);
  const SchemeState s0 = stepper.initial_state(initial_phi(1, stepper.discretization().scalar_space()));
  std::vector<DiagnosticsRecord> records;
  int fields = 0;
  RunSinks sinks;
  sinks.diagnostics = [&](const DiagnosticsRecord& r) { records.push_back(r); };
  sinks.fields = [&](const SchemeState&) { ++fields; };
  sinks.field_stride = 5;
  const SchemeState last = run(stepper, s0, sinks);
  REQUIRE(records.size() == 10);
  CHECK(last.step == 10);
  CHECK(fields == 3);
  double e_prev = energy(stepper.discretization(), config.laws, s0.phi, s0.velocity, 0.0).total;
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].step == static_cast<int>(i + 1));
    CHECK(records[i].e_total <= e_prev + 1e-9);
    e_prev = records[i].e_total;
  }
}

TEST_CASE("number of steps") {
  SchemeConfig config;
  config.tau = 1e-3;
  config.final_time = 1e-3;
  CHECK(config.num_steps() == 1);
  config.final_time = 0.0105;
  CHECK(config.num_steps() == 10);
  config.tau = 0.1;
  config.final_time = 0.3;
  CHECK(config.num_steps() == 3);
}

TEST_CASE("config validation") {
  SchemeConfig config;
  CHECK_NOTHROW(config.validate());
  config.tau = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = SchemeConfig{};
  config.final_time = 1e-4;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = SchemeConfig{};
  config.newton_tol = -1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = SchemeConfig{};
  config.darcy_order = 2;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("Newton failure carries the report and the starting state") {
  SchemeConfig config;
  config.n = 8;
  config.newton_max_iter = 1;
  Stepper stepper(config);
  const SchemeState s0 = stepper.initial_state(initial_phi(5, stepper.discretization().scalar_space()));
  try {
    stepper.step(s0);
    FAIL("expected a step failure");
  } catch (const StepFailure& e) {
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().iterations == 1);
    CHECK(e.report().residual > config.newton_tol);
    CHECK(e.state().step == 0);
    CHECK(std::string(e.kind()) == "step-failure");
  }
}

TEST_CASE("runs are deterministic") {
  SchemeConfig config;
  config.scheme = SchemeKind::CHNS;
  config.n = 4;
  config.final_time = 3e-3;
  auto once = [&] {
    Stepper stepper(config);
    const SchemeState s0 = stepper.initial_state(initial_phi(9, stepper.discretization().scalar_space()));
    return run(stepper, s0, {}).velocity.coefficients;
  };
  CHECK(once() == once());
}
