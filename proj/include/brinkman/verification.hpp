#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "brinkman/fem.hpp"

namespace brinkman {

using VectorFunction = std::function<FieldValue(const Point&)>;
using ScalarFunction = std::function<double(const Point&)>;

/// Closed-form Stokes solution on the unit square, planar coordinates.
struct StokesCase {
  std::string name;
  VectorFunction u;
  ScalarFunction p;
  double nu = 1.0;
};

StokesCase stokes_trig_case();        // (sin pi x cos pi y, -cos pi x sin pi y), cos pi x cos pi y
StokesCase stokes_polynomial_case();  // (x^2, -2xy), x + y
StokesCase stokes_linear_case();      // (1 + x, -y), constant

/// Oracle data computed by finite differences of the closed forms.
struct StokesManufactured {
  VectorFunction forcing;   // -nu lap u + grad p
  /// Traction (nu (grad u + grad u^T) - p I) n for the outward normal n.
  std::function<FieldValue(const Point&, const Point&)> traction;
};

/// Rejects fields whose divergence exceeds 1e-10 on a sample grid.
StokesManufactured mms_stokes(const StokesCase& c);

/// Fourth-order central differences used by the oracles.
Point fd_gradient(const ScalarFunction& f, const Point& x, double h = 1e-4);
double fd_laplacian(const ScalarFunction& f, const Point& x, double h = 1e-3);

struct StokesErrors {
  double h = 0.0;
  double velocity = 0.0;
  double pressure = 0.0;
};

/// Taylor-Hood solve of the case on an n x n criss-cross mesh of the unit
/// square: exact velocity on the bottom, left and right sides, traction on
/// the top side.
StokesErrors solve_stokes_case(const StokesCase& c, int n);

struct ConvergenceReport {
  std::string name;
  std::vector<double> h;
  std::vector<double> velocity_error;
  std::vector<double> pressure_error;
  std::vector<double> scalar_error;
  /// Rates for consecutive levels with h ratio 2 +- 5%; empty when not
  /// applicable (ratio off, or errors at round-off level).
  std::vector<std::optional<double>> velocity_rate;
  std::vector<std::optional<double>> pressure_rate;
  std::vector<std::optional<double>> scalar_rate;
};

/// log2-style rate between consecutive levels.
std::vector<std::optional<double>> observed_rates(const std::vector<double>& h,
                                                  const std::vector<double>& errors,
                                                  double floor = 1e-11);

ConvergenceReport convergence_study(const StokesCase& c, const std::vector<int>& levels);

struct AdvectionErrors {
  double h = 0.0;
  double transport = 0.0;      // composed field against the shifted Gaussian
  double interpolation = 0.0;  // P2 interpolant of the shifted Gaussian
};

/// One composition step of a P2 Gaussian (centre (0.5, 0.5), width 0.1)
/// under a uniform velocity on an n x n unit-square mesh, with dt set by
/// the Courant number based on the cell size.
AdvectionErrors advection_case(int n, double courant, int substeps = 1);
ConvergenceReport advection_study(const std::vector<int>& levels, double courant);

std::string format_report_csv(const ConvergenceReport& report);
std::string format_report_text(const ConvergenceReport& report);

struct FdCheck {
  double estimate = 0.0;
  double analytic = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

/// Central difference (f(x + d) - f(x - d)) / (2 d) against an analytic slope.
FdCheck fd_check(const std::function<double(double)>& f, double x, double step,
                 double analytic);

/// One dissipation-only TKE step from a constant state c.
double k_decay_closed_form(double c, double dt, double C3, double ell);

}  // namespace brinkman
