#include "sbtrans/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sbtrans {

namespace {

void push_sym3(QuadratureRule& r, double a, double w) {
  // Orbit of (1-2a, a, a) under coordinate permutation.
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  r.weights.insert(r.weights.end(), 3, w);
}

}  // namespace

QuadratureRule triangle_rule(int degree) {
  QuadratureRule r;
  if (degree <= 1) {
    r.degree = 1;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.5);
  } else if (degree == 2) {
    r.degree = 2;
    push_sym3(r, 1.0 / 6.0, 1.0 / 6.0);
  } else if (degree <= 4) {
    r.degree = 4;
    push_sym3(r, 0.445948490915965, 0.5 * 0.223381589678011);
    push_sym3(r, 0.091576213509771, 0.5 * 0.109951743655322);
  } else if (degree == 5) {
    r.degree = 5;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.5 * 0.225);
    push_sym3(r, 0.470142064105115, 0.5 * 0.132394152788506);
    push_sym3(r, 0.101286507323456, 0.5 * 0.125939180544827);
  } else {
    throw std::invalid_argument("triangle_rule: unsupported degree");
  }
  return r;
}

LineRule line_rule(int n) {
  LineRule r;
  switch (n) {
    case 1:
      r.points = {0.5};
      r.weights = {1.0};
      break;
    case 2: {
      const double d = 0.5 / std::sqrt(3.0);
      r.points = {0.5 - d, 0.5 + d};
      r.weights = {0.5, 0.5};
      break;
    }
    case 3: {
      const double d = 0.5 * std::sqrt(0.6);
      r.points = {0.5 - d, 0.5, 0.5 + d};
      r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    default:
      throw std::invalid_argument("line_rule: unsupported point count");
  }
  return r;
}

}  // namespace sbtrans
