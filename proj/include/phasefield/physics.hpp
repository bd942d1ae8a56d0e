#pragma once

namespace phasefield {

/// Constitutive parameters of the phase-field models.
struct MaterialLaws {
  double gamma = 1e-4;          // interfacial parameter
  double mobility_scale = 5.0;
  double mobility_floor = 1e-6;
  double alpha0 = 1e-2;         // permeability weight in phase 0
  double alpha1 = 1.0;          // ... and in phase 1
  double eta0 = 1e-4;           // viscosity in phase 0
  double eta1 = 1e-2;           // ... and in phase 1

  /// Throws std::invalid_argument if any parameter is non-positive.
  void validate() const;
};

/// f(phi) = 1/4 phi^2 (1 - phi)^2.
double double_well(double phi);
/// f'(phi) = phi^3 - 3/2 phi^2 + 1/2 phi.
double double_well_prime(double phi);
double double_well_second(double phi);

/// Time-averaged derivative of f along the straight path from `a` (old level)
/// to `b` (new level). Equals the divided difference (f(b) - f(a)) / (b - a) and
/// is evaluated as a symmetric cubic, so a == b is regular.
double dg_potential(double a, double b);
/// Partial derivative of dg_potential with respect to b.
double dg_potential_db(double a, double b);

/// m(phi) = scale * max(phi^2 (1 - phi)^2, 0) + floor.
double mobility(const MaterialLaws& laws, double phi);
double mobility_prime(const MaterialLaws& laws, double phi);

/// Geometric interpolation exp(phi ln(v1) + (1 - phi) ln(v0)).
double alpha(const MaterialLaws& laws, double phi);
double alpha_prime(const MaterialLaws& laws, double phi);
double eta(const MaterialLaws& laws, double phi);
double eta_prime(const MaterialLaws& laws, double phi);

}  // namespace phasefield
