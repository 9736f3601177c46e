#include "brinkman/quadrature.hpp"

#include <cmath>

#include "brinkman/types.hpp"

namespace brinkman {

namespace {

// Dunavant's symmetric rules. Orbits: centroid, (a, a, 1-2a), (a, b, c).
void add_centroid(std::vector<QuadraturePoint>& rule, double w) {
  rule.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, w});
}

void add_orbit3(std::vector<QuadraturePoint>& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.push_back({{b, a, a}, w});
  rule.push_back({{a, b, a}, w});
  rule.push_back({{a, a, b}, w});
}

void add_orbit6(std::vector<QuadraturePoint>& rule, double a, double b, double w) {
  const double c = 1.0 - a - b;
  rule.push_back({{a, b, c}, w});
  rule.push_back({{a, c, b}, w});
  rule.push_back({{b, a, c}, w});
  rule.push_back({{b, c, a}, w});
  rule.push_back({{c, a, b}, w});
  rule.push_back({{c, b, a}, w});
}

std::vector<QuadraturePoint> make_rule(int degree) {
  std::vector<QuadraturePoint> rule;
  switch (degree) {
    case 1:
      add_centroid(rule, 1.0);
      break;
    case 2:
      add_orbit3(rule, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 3:  // degree-4 rule; the classical degree-3 rule has a negative weight
    case 4:
      add_orbit3(rule, 0.445948490915965, 0.223381589678011);
      add_orbit3(rule, 0.091576213509771, 0.109951743655322);
      break;
    case 5: {
      const double s = std::sqrt(15.0);
      add_centroid(rule, 9.0 / 40.0);
      add_orbit3(rule, (6.0 + s) / 21.0, (155.0 + s) / 1200.0);
      add_orbit3(rule, (6.0 - s) / 21.0, (155.0 - s) / 1200.0);
      break;
    }
    case 6:
      add_orbit3(rule, 0.249286745170910, 0.116786275726379);
      add_orbit3(rule, 0.063089014491502, 0.050844906370207);
      add_orbit6(rule, 0.053145049844817, 0.310352451033784, 0.082851075618374);
      break;
    default:
      throw Error("unsupported quadrature degree " + std::to_string(degree) +
                  " (expected 1..6)");
  }
  return rule;
}

}  // namespace

const std::vector<QuadraturePoint>& quadrature_rule(int degree) {
  static const std::array<std::vector<QuadraturePoint>, 6> rules = {
      make_rule(1), make_rule(2), make_rule(3), make_rule(4), make_rule(5), make_rule(6)};
  if (degree < 1 || degree > 6) {
    throw Error("unsupported quadrature degree " + std::to_string(degree) +
                " (expected 1..6)");
  }
  return rules[degree - 1];
}

const std::vector<LineQuadraturePoint>& line_quadrature_rule(int degree) {
  static const std::vector<LineQuadraturePoint> two = {
      {0.5 - 0.5 / std::sqrt(3.0), 0.5}, {0.5 + 0.5 / std::sqrt(3.0), 0.5}};
  static const std::vector<LineQuadraturePoint> three = {
      {0.5 - 0.5 * std::sqrt(0.6), 5.0 / 18.0},
      {0.5, 8.0 / 18.0},
      {0.5 + 0.5 * std::sqrt(0.6), 5.0 / 18.0}};
  if (degree <= 3) return two;
  if (degree <= 5) return three;
  throw Error("unsupported line quadrature degree " + std::to_string(degree));
}

}  // namespace brinkman
