#pragma once

#include <array>
#include <vector>

namespace sbtrans {

/// Symmetric Gauss rule on the reference triangle {(0,0),(1,0),(0,1)}.
/// Points are barycentric triples; weights sum to the reference area 1/2.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;  // highest polynomial degree integrated exactly
};

/// Rule of minimal size with exactness at least `degree` (supported: 1..5).
QuadratureRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] with `n` points (supported: 1..3).
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1
};
LineRule line_rule(int n);

}  // namespace sbtrans
