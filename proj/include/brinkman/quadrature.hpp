#pragma once

#include <array>
#include <vector>

namespace brinkman {

struct QuadraturePoint {
  std::array<double, 3> bary;
  double weight;  // weights sum to 1; physical weight is area * weight
};

/// Symmetric positive-weight rules on the triangle, exact up to `degree`
/// (1..6). Throws for unsupported degrees.
const std::vector<QuadraturePoint>& quadrature_rule(int degree);

/// Two-point Gauss rule on [0, 1] for boundary edges (exact to degree 3),
/// and a three-point rule exact to degree 5.
struct LineQuadraturePoint {
  double s;
  double weight;  // sums to 1
};
const std::vector<LineQuadraturePoint>& line_quadrature_rule(int degree);

}  // namespace brinkman
