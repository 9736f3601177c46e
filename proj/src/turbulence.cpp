#include "brinkman/turbulence.hpp"

#include <algorithm>
#include <cmath>

namespace brinkman {

namespace {

// Hermite cubic on [k_c, k_c + 1] joining (v1, slope) to (v2, 0).
double blended(double k, double base, double slope_at_kc, double v1, double v2, double k_c) {
  const double a = std::abs(k);
  if (a <= k_c) return base;
  if (a >= k_c + 1.0) return v2;
  const double s = a - k_c;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  return h00 * v1 + h10 * slope_at_kc + h01 * v2;
}

}  // namespace

void TurbulenceParams::resolve_v2(double max_mixing_length) {
  if (v2 <= 0.0) v2 = 1.05 * (nu0 + max_mixing_length * std::sqrt(tau + k_c));
}

void TurbulenceParams::validate(double max_mixing_length) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be positive, got " + std::to_string(v));
    }
  };
  positive(nu0, "nu0");
  positive(tau, "tau");
  positive(tau_tilde, "tau_tilde");
  positive(k_c, "k_c");
  positive(C, "C");
  for (const auto& [v, name] : {std::pair{C1, "C1"}, std::pair{C2, "C2"}, std::pair{C3, "C3"}}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be non-negative, got " + std::to_string(v));
    }
  }
  positive(k_floor, "k_floor");
  if (v2 > 0.0 && max_mixing_length > 0.0) {
    const double v1 = nu0 + max_mixing_length * std::sqrt(tau + k_c);
    if (!(v2 > v1)) {
      throw ConfigError("v2 must exceed v1 = " + std::to_string(v1) + " for the largest mixing length");
    }
  }
}

double eddy_viscosity_blended(double k, double ell, const TurbulenceParams& p) {
  const double v1 = p.nu0 + ell * std::sqrt(p.tau + p.k_c);
  return blended(k, p.nu0 + ell * std::sqrt(p.tau + std::abs(k)),
                 ell / (2.0 * std::sqrt(p.tau + p.k_c)), v1, p.v2, p.k_c);
}

double eddy_diffusivity_blended(double k, double ell, const TurbulenceParams& p) {
  const double v1 = p.nu0 + p.C * ell * std::sqrt(p.tau_tilde + p.k_c);
  return blended(k, p.nu0 + p.C * ell * std::sqrt(p.tau_tilde + std::abs(k)),
                 p.C * ell / (2.0 * std::sqrt(p.tau_tilde + p.k_c)), v1, p.v2, p.k_c);
}

double backward_term(double k, double ell) {
  if (k < 0.0) throw Error("backward term needs k >= 0 (floor k first)");
  return k * std::sqrt(k) / ell;
}

SchemeCoefficients scheme_coefficients(double k_prev, double ell, const TurbulenceParams& p) {
  const double sk = std::sqrt(k_prev);
  return {p.nu0 + p.C1 * ell * sk, p.C2 * ell * sk, p.C3 * sk / ell};
}

SchemeCoefficientField::SchemeCoefficientField(const DiscreteField& k_prev,
                                               std::span<const double> mixing_length,
                                               const TurbulenceParams& params)
    : k_(k_prev), ell_(mixing_length), params_(params) {
  if (static_cast<int>(ell_.size()) != k_.space().mesh().n_triangles()) {
    throw Error("mixing length must have one value per triangle");
  }
}

double SchemeCoefficientField::k_at(const QuadPoint& qp) const {
  return std::max(k_.value_in_cell(qp.triangle, qp.bary)[0], params_.k_floor);
}

SchemeCoefficients SchemeCoefficientField::at(const QuadPoint& qp) const {
  return scheme_coefficients(k_at(qp), ell_[qp.triangle], params_);
}

}  // namespace brinkman
