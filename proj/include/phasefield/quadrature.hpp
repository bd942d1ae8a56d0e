#pragma once

#include <vector>

#include "phasefield/mesh.hpp"

namespace phasefield {

/// Symmetric rule on the reference triangle (0,0), (1,0), (0,1).
/// Weights are positive and sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Smallest tabulated symmetric rule exact to at least `degree`, 1 <= degree <= 8.
/// Throws std::invalid_argument otherwise.
QuadratureRule quadrature(int degree);

/// Gauss-Legendre rule on [0, 1] with `n` points (1 <= n <= 4).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_line(int n);

}  // namespace phasefield
