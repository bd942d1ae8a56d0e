#include "phasefield/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phasefield {

namespace {

// Barycentric orbits of a fully symmetric rule. Weights are normalized to a
// unit-area triangle and scaled by 1/2 when the rule is built.
class RuleBuilder {
 public:
  explicit RuleBuilder(int degree) { rule_.degree = degree; }

  RuleBuilder& centroid(double w) {
    add(1.0 / 3.0, 1.0 / 3.0, w);
    return *this;
  }
  // (1-2a, a, a) and its permutations.
  RuleBuilder& orbit3(double w, double a) {
    const double b = 1.0 - 2.0 * a;
    add(a, a, w);
    add(b, a, w);
    add(a, b, w);
    return *this;
  }
  // (a, b, 1-a-b) and its permutations.
  RuleBuilder& orbit6(double w, double a, double b) {
    const double c = 1.0 - a - b;
    add(a, b, w);
    add(b, a, w);
    add(a, c, w);
    add(c, a, w);
    add(b, c, w);
    add(c, b, w);
    return *this;
  }
  QuadratureRule build() const { return rule_; }

 private:
  void add(double x, double y, double w) {
    rule_.points.push_back({x, y});
    rule_.weights.push_back(0.5 * w);
  }
  QuadratureRule rule_;
};

}  // namespace

QuadratureRule quadrature(int degree) {
  switch (degree) {
    case 1:
      return RuleBuilder(1).centroid(1.0).build();
    case 2:
      return RuleBuilder(2).orbit3(1.0 / 3.0, 1.0 / 6.0).build();
    case 3:
    case 4:
      return RuleBuilder(4)
          .orbit3(0.22338158967801146570, 0.44594849091596488632)
          .orbit3(0.10995174365532186764, 0.091576213509770743460)
          .build();
    case 5:
      return RuleBuilder(5)
          .centroid(0.225)
          .orbit3(0.13239415278850618074, 0.47014206410511508977)
          .orbit3(0.12593918054482715260, 0.10128650732345633880)
          .build();
    case 6:
      return RuleBuilder(6)
          .orbit3(0.11678627572637936603, 0.24928674517091042129)
          .orbit3(0.050844906370206816921, 0.063089014491502228340)
          .orbit6(0.082851075618373575194, 0.053145049844816947353, 0.31035245103378440542)
          .build();
    case 7:
    case 8:
      return RuleBuilder(8)
          .centroid(0.14431560767778716825)
          .orbit3(0.095091634267284624794, 0.45929258829272315603)
          .orbit3(0.10321737053471825028, 0.17056930775176020662)
          .orbit3(0.032458497623198080311, 0.050547228317030975458)
          .orbit6(0.027230314174434994265, 0.0083947774099576053372, 0.26311282963463811342)
          .build();
    default:
      throw std::invalid_argument("unsupported quadrature degree " + std::to_string(degree) +
                                  " (expected 1..8)");
  }
}

LineRule gauss_line(int n) {
  LineRule r;
  auto add = [&r](double x, double w) {
    r.points.push_back(0.5 * (x + 1.0));
    r.weights.push_back(0.5 * w);
  };
  switch (n) {
    case 1:
      add(0.0, 2.0);
      break;
    case 2: {
      const double x = 1.0 / std::sqrt(3.0);
      add(-x, 1.0);
      add(x, 1.0);
      break;
    }
    case 3: {
      const double x = std::sqrt(0.6);
      add(-x, 5.0 / 9.0);
      add(0.0, 8.0 / 9.0);
      add(x, 5.0 / 9.0);
      break;
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      add(-b, wb);
      add(-a, wa);
      add(a, wa);
      add(b, wb);
      break;
    }
    default:
      throw std::invalid_argument("unsupported Gauss-Legendre size " + std::to_string(n));
  }
  return r;
}

}  // namespace phasefield
