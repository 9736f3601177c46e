#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "brinkman/verification.hpp"

using namespace brinkman;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(FdCheck, SquareSlope) {
  const FdCheck c = fd_check([](double k) { return k * k; }, 3.0, 1e-4, 6.0);
  EXPECT_NEAR(c.estimate, 6.0, 1e-8);
  EXPECT_LT(c.rel_error, 1e-9);
  EXPECT_THROW(fd_check([](double k) { return k; }, 0.0, 0.0, 1.0), Error);
}

TEST(FdGradient, Polynomial) {
  const Point g = fd_gradient([](const Point& x) { return x.r * x.r * x.z + 2 * x.z; }, {0.5, 2.0});
  EXPECT_NEAR(g.r, 2.0, 1e-9);
  EXPECT_NEAR(g.z, 2.25, 1e-9);
  EXPECT_NEAR(fd_laplacian([](const Point& x) { return x.r * x.r + 3 * x.z * x.z; }, {0.1, 0.2}),
              8.0, 1e-6);
}

TEST(Mms, TrigForcingMatchesAnalytic) {
  const StokesCase c = stokes_trig_case();
  const StokesManufactured m = mms_stokes(c);
  for (const Point x : {Point{0.2, 0.3}, Point{0.71, 0.45}, Point{0.9, 0.1}}) {
    const FieldValue u = c.u(x);
    const FieldValue f = m.forcing(x);
    // -lap u = 2 pi^2 u for this field; grad p = -pi (sin pi x cos pi y, cos pi x sin pi y).
    const double gpx = -kPi * std::sin(kPi * x.r) * std::cos(kPi * x.z);
    const double gpy = -kPi * std::cos(kPi * x.r) * std::sin(kPi * x.z);
    EXPECT_NEAR(f[0], 2 * kPi * kPi * u[0] + gpx, 1e-6);
    EXPECT_NEAR(f[1], 2 * kPi * kPi * u[1] + gpy, 1e-6);
  }
}

TEST(Mms, RejectsDivergentField) {
  StokesCase c = stokes_linear_case();
  c.u = [](const Point& x) { return FieldValue{x.r, x.z}; };
  EXPECT_THROW(mms_stokes(c), Error);
}

TEST(Mms, LinearCaseIsReproduced) {
  const StokesErrors e = solve_stokes_case(stokes_linear_case(), 4);
  EXPECT_LT(e.velocity, 1e-10);
  EXPECT_LT(e.pressure, 1e-8);
}

TEST(Mms, QuadraticCaseIsReproduced) {
  const StokesErrors e = solve_stokes_case(stokes_polynomial_case(), 4);
  EXPECT_LT(e.velocity, 1e-9);
  EXPECT_LT(e.pressure, 1e-7);
}

TEST(Rates, ObservedRates) {
  const auto r = observed_rates({0.4, 0.2, 0.1, 0.07}, {1.0, 0.125, 0.015625, 0.01});
  ASSERT_EQ(r.size(), 4u);
  EXPECT_FALSE(r[0].has_value());
  EXPECT_NEAR(*r[1], 3.0, 1e-12);
  EXPECT_NEAR(*r[2], 3.0, 1e-12);
  EXPECT_FALSE(r[3].has_value());
  const auto floor = observed_rates({0.2, 0.1}, {1e-13, 1e-14});
  EXPECT_FALSE(floor[1].has_value());
}

TEST(Rates, TrigStudyReport) {
  const ConvergenceReport r = convergence_study(stokes_trig_case(), {4, 8, 16});
  ASSERT_EQ(r.velocity_error.size(), 3u);
  EXPECT_GT(*r.velocity_rate[2], 2.5);
  EXPECT_GT(*r.pressure_rate[2], 1.5);
  const std::string csv = format_report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "case,h,velocity_error,pressure_error,scalar_error,velocity_rate,pressure_rate,scalar_rate");
  EXPECT_NE(format_report_text(r).find("stokes-trig"), std::string::npos);
  EXPECT_THROW(convergence_study(stokes_trig_case(), {4, 8}), Error);
}

TEST(KDecay, ClosedForm) {
  EXPECT_DOUBLE_EQ(k_decay_closed_form(0.04, 1.0, 0.03, 0.1), 0.04 / (1.0 + 0.3 * 0.2));
  EXPECT_EQ(k_decay_closed_form(0.04, 1.0, 0.0, 0.1), 0.04);
}
