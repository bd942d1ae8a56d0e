#include "phasefield/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phasefield {

void MaterialLaws::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(gamma, "gamma");
  positive(mobility_floor, "mobility_floor");
  if (!(mobility_scale >= 0.0)) throw std::invalid_argument("mobility_scale must be non-negative");
  positive(alpha0, "alpha0");
  positive(alpha1, "alpha1");
  positive(eta0, "eta0");
  positive(eta1, "eta1");
}

double double_well(double phi) {
  const double s = phi * (1.0 - phi);
  return 0.25 * s * s;
}

double double_well_prime(double phi) { return phi * phi * phi - 1.5 * phi * phi + 0.5 * phi; }

double double_well_second(double phi) { return 3.0 * phi * phi - 3.0 * phi + 0.5; }

double dg_potential(double a, double b) {
  if (a == b) return double_well_prime(a);
  const double a2 = a * a, b2 = b * b;
  return 0.25 * (a2 * a + a2 * b + a * b2 + b2 * b) - 0.5 * (a2 + a * b + b2) + 0.25 * (a + b);
}

double dg_potential_db(double a, double b) {
  return 0.25 * (a * a + 2.0 * a * b + 3.0 * b * b) - 0.5 * (a + 2.0 * b) + 0.25;
}

double mobility(const MaterialLaws& laws, double phi) {
  const double s = phi * (1.0 - phi);
  return laws.mobility_scale * std::max(s * s, 0.0) + laws.mobility_floor;
}

double mobility_prime(const MaterialLaws& laws, double phi) {
  return laws.mobility_scale * 2.0 * phi * (1.0 - phi) * (1.0 - 2.0 * phi);
}

namespace {

double geometric(double v0, double v1, double phi) {
  return std::exp(phi * std::log(v1) + (1.0 - phi) * std::log(v0));
}

}  // namespace

double alpha(const MaterialLaws& laws, double phi) { return geometric(laws.alpha0, laws.alpha1, phi); }

double alpha_prime(const MaterialLaws& laws, double phi) {
  return alpha(laws, phi) * (std::log(laws.alpha1) - std::log(laws.alpha0));
}

double eta(const MaterialLaws& laws, double phi) { return geometric(laws.eta0, laws.eta1, phi); }

double eta_prime(const MaterialLaws& laws, double phi) {
  return eta(laws, phi) * (std::log(laws.eta1) - std::log(laws.eta0));
}

}  // namespace phasefield
