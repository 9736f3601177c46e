#pragma once

#include <span>
#include <vector>

#include "brinkman/fem.hpp"

namespace brinkman {

/// Constants of the one-equation closure. Units: nu0, v2 in m^2/s;
/// tau, tau_tilde, k_c, k_floor in m^2/s^2; C, C1, C2, C3 dimensionless.
struct TurbulenceParams {
  double nu0 = 1.141e-6;
  double tau = 1e-4;
  double tau_tilde = 1e-4;
  double k_c = 1.0;
  double v2 = 0.0;  // <= 0 means 1.05 * (nu0 + L0 sqrt(tau + k_c)), see resolve_v2
  double C = 1.0;
  double C1 = 0.1;
  double C2 = 0.05;
  double C3 = 0.03;
  double k_floor = 1e-10;

  /// Fills v2 from the largest mixing length when it was left automatic.
  void resolve_v2(double max_mixing_length);
  /// Throws ConfigError when a constant is out of range; `max_mixing_length`
  /// checks v2 > v1 for the blended law.
  void validate(double max_mixing_length) const;
};

/// nu0 + l sqrt(tau + |k|) up to k_c, v2 beyond k_c + 1, and the C1 cubic
/// in between.
double eddy_viscosity_blended(double k, double ell, const TurbulenceParams& p);

/// Same shape as the eddy viscosity with nu0 + C l sqrt(tau_tilde + |k|).
double eddy_diffusivity_blended(double k, double ell, const TurbulenceParams& p);

/// Dissipation sink k sqrt(k) / l. Throws for negative k.
double backward_term(double k, double ell);

/// Coefficients of the discrete scheme at one point.
struct SchemeCoefficients {
  double viscosity;    // nu0 + C1 l sqrt(k)
  double diffusivity;  // C2 l sqrt(k)
  double dissipation;  // C3 sqrt(k) / l
};

SchemeCoefficients scheme_coefficients(double k_prev, double ell, const TurbulenceParams& p);

/// Scheme coefficients as functions of the quadrature point, built from the
/// previous TKE field (floored at k_floor) and the per-triangle mixing length.
class SchemeCoefficientField {
 public:
  SchemeCoefficientField(const DiscreteField& k_prev, std::span<const double> mixing_length,
                         const TurbulenceParams& params);

  double k_at(const QuadPoint& qp) const;
  SchemeCoefficients at(const QuadPoint& qp) const;
  double ell(int triangle) const { return ell_[triangle]; }

 private:
  const DiscreteField& k_;
  std::span<const double> ell_;
  TurbulenceParams params_;
};

}  // namespace brinkman
