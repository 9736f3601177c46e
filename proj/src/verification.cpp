#include "brinkman/verification.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "brinkman/assembly.hpp"
#include "brinkman/characteristics.hpp"
#include "brinkman/geometry.hpp"

namespace brinkman {

namespace {

constexpr double kPi = std::numbers::pi;

double fd_second(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

double fd_first(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

ScalarFunction component(const VectorFunction& u, int c) {
  return [u, c](const Point& x) { return u(x)[c]; };
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(6);
  os << *v;
  return os.str();
}

}  // namespace

StokesCase stokes_trig_case() {
  return {"stokes-trig",
          [](const Point& x) {
            return FieldValue{std::sin(kPi * x.r) * std::cos(kPi * x.z),
                              -std::cos(kPi * x.r) * std::sin(kPi * x.z)};
          },
          [](const Point& x) { return std::cos(kPi * x.r) * std::cos(kPi * x.z); }, 1.0};
}

StokesCase stokes_polynomial_case() {
  return {"stokes-poly",
          [](const Point& x) { return FieldValue{x.r * x.r, -2.0 * x.r * x.z}; },
          [](const Point& x) { return x.r + x.z; }, 1.0};
}

StokesCase stokes_linear_case() {
  return {"stokes-linear", [](const Point& x) { return FieldValue{1.0 + x.r, -x.z}; },
          [](const Point&) { return 0.5; }, 1.0};
}

Point fd_gradient(const ScalarFunction& f, const Point& x, double h) {
  return {fd_first([&](double s) { return f({s, x.z}); }, x.r, h),
          fd_first([&](double s) { return f({x.r, s}); }, x.z, h)};
}

double fd_laplacian(const ScalarFunction& f, const Point& x, double h) {
  return fd_second([&](double s) { return f({s, x.z}); }, x.r, h) +
         fd_second([&](double s) { return f({x.r, s}); }, x.z, h);
}

StokesManufactured mms_stokes(const StokesCase& c) {
  const ScalarFunction ur = component(c.u, 0);
  const ScalarFunction uz = component(c.u, 1);
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const Point x{0.1 * i, 0.1 * j};
      const double div = fd_gradient(ur, x).r + fd_gradient(uz, x).z;
      if (std::abs(div) > 1e-10) {
        throw Error(c.name + ": velocity is not divergence-free (|div u| = " +
                    std::to_string(std::abs(div)) + ")");
      }
    }
  }
  StokesManufactured m;
  const double nu = c.nu;
  const ScalarFunction p = c.p;
  m.forcing = [nu, ur, uz, p](const Point& x) {
    const Point gp = fd_gradient(p, x);
    return FieldValue{-nu * fd_laplacian(ur, x) + gp.r, -nu * fd_laplacian(uz, x) + gp.z};
  };
  m.traction = [nu, ur, uz, p](const Point& x, const Point& n) {
    const Point gr = fd_gradient(ur, x);
    const Point gz = fd_gradient(uz, x);
    const double drr = 2.0 * gr.r;
    const double drz = gr.z + gz.r;
    const double dzz = 2.0 * gz.z;
    const double pv = p(x);
    return FieldValue{nu * (drr * n.r + drz * n.z) - pv * n.r,
                      nu * (drz * n.r + dzz * n.z) - pv * n.z};
  };
  return m;
}

StokesErrors solve_stokes_case(const StokesCase& c, int n) {
  if (n < 1) throw Error("need at least one cell per side");
  const StokesManufactured m = mms_stokes(c);
  auto mesh = std::make_shared<const Mesh>(structured_box_mesh({0.0, 0.0}, {1.0, 1.0}, n, n));
  auto p2 = std::make_shared<const FunctionSpace>(mesh, 2);
  auto p1 = std::make_shared<const FunctionSpace>(mesh, 1);
  const IntegrationMode mode = IntegrationMode::Planar;
  const double nu = c.nu;

  WeakForm visc{Kernel::SymmetricGradient, [nu](const QuadPoint&) { return nu; },
                BoundaryTag::Outlet, 1, 5};
  const SparseMatrix a = assemble_bilinear(*p2, *p2, visc, mode);
  WeakForm div{Kernel::PressureDivergence, {}, BoundaryTag::Outlet, 1, 5};
  const SparseMatrix b = assemble_bilinear(*p2, *p1, div, mode);
  const SparseMatrix bt = b.transpose();

  const int nu_dofs = 2 * p2->n_dofs();
  const int np = p1->n_dofs();
  Triplets triplets;
  add_block(triplets, a, 0, 0);
  add_block(triplets, b, nu_dofs, 0);
  add_block(triplets, bt, 0, nu_dofs);
  SparseSystem system;
  system.matrix.resize(nu_dofs + np, nu_dofs + np);
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system.rhs = Vector::Zero(nu_dofs + np);
  system.rhs.head(nu_dofs) =
      assemble_load(*p2, 2, [&](const QuadPoint& qp) { return m.forcing(qp.x); }, mode, 6) +
      assemble_boundary_load(
          *p2, 2, BoundaryTag::Outlet,
          [&](const QuadPoint& qp) { return m.traction(qp.x, qp.normal); }, mode, 5);

  std::vector<DirichletValue> constraints;
  std::vector<char> seen(p2->n_dofs(), 0);
  for (const BoundaryEdge& be : mesh->boundary_edges()) {
    if (be.tag == BoundaryTag::Outlet) continue;
    for (int d : p2->edge_dofs(be)) {
      if (seen[d]) continue;
      seen[d] = 1;
      const FieldValue v = c.u(p2->dof_point(d));
      constraints.push_back({d, v[0]});
      constraints.push_back({p2->n_dofs() + d, v[1]});
    }
  }
  apply_dirichlet(system, constraints);
  const Vector x = solve(system, {});

  DiscreteField uh(p2, 2, std::vector<double>(x.data(), x.data() + nu_dofs));
  DiscreteField ph(p1, 1, std::vector<double>(x.data() + nu_dofs, x.data() + nu_dofs + np));
  StokesErrors e;
  e.h = 1.0 / n;
  e.velocity = l2_error(uh, c.u, mode);
  e.pressure = l2_error(ph, [&](const Point& y) { return FieldValue{c.p(y), 0.0}; }, mode);
  return e;
}

std::vector<std::optional<double>> observed_rates(const std::vector<double>& h,
                                                  const std::vector<double>& errors,
                                                  double floor) {
  std::vector<std::optional<double>> rates(errors.size());
  for (std::size_t i = 1; i < errors.size() && i < h.size(); ++i) {
    const double ratio = h[i - 1] / h[i];
    if (std::abs(ratio - 2.0) > 0.1) continue;
    if (errors[i] <= floor || errors[i - 1] <= floor) continue;
    rates[i] = std::log(errors[i - 1] / errors[i]) / std::log(ratio);
  }
  return rates;
}

ConvergenceReport convergence_study(const StokesCase& c, const std::vector<int>& levels) {
  if (levels.size() < 3) throw Error("convergence study needs at least three mesh levels");
  ConvergenceReport r;
  r.name = c.name;
  for (int n : levels) {
    const StokesErrors e = solve_stokes_case(c, n);
    r.h.push_back(e.h);
    r.velocity_error.push_back(e.velocity);
    r.pressure_error.push_back(e.pressure);
  }
  r.velocity_rate = observed_rates(r.h, r.velocity_error);
  r.pressure_rate = observed_rates(r.h, r.pressure_error);
  return r;
}

AdvectionErrors advection_case(int n, double courant, int substeps) {
  auto mesh = std::make_shared<const Mesh>(structured_box_mesh({0.0, 0.0}, {1.0, 1.0}, n, n));
  auto p2 = std::make_shared<const FunctionSpace>(mesh, 2);
  const Point a{0.6, 0.8};
  const double h = 1.0 / n;
  const double dt = courant * h / norm(a);
  auto gaussian = [](const Point& x) {
    const double d2 = (x.r - 0.5) * (x.r - 0.5) + (x.z - 0.5) * (x.z - 0.5);
    return std::exp(-d2 / (2.0 * 0.1 * 0.1));
  };
  auto shifted = [&](const Point& x) { return FieldValue{gaussian(x - dt * a), 0.0}; };
  const DiscreteField b =
      DiscreteField::interpolate(p2, 1, [&](const Point& x) { return FieldValue{gaussian(x), 0.0}; });
  const DiscreteField velocity =
      DiscreteField::interpolate(p2, 2, [&](const Point&) { return FieldValue{a.r, a.z}; });
  ComposeOptions options;
  options.substeps = substeps;
  const DiscreteField composed = compose_field(b, velocity, dt, options);
  AdvectionErrors e;
  e.h = h;
  e.transport = l2_error(composed, shifted, IntegrationMode::Planar);
  e.interpolation =
      l2_error(DiscreteField::interpolate(p2, 1, shifted), shifted, IntegrationMode::Planar);
  return e;
}

ConvergenceReport advection_study(const std::vector<int>& levels, double courant) {
  if (levels.size() < 3) throw Error("convergence study needs at least three mesh levels");
  ConvergenceReport r;
  r.name = "advection";
  for (int n : levels) {
    const AdvectionErrors e = advection_case(n, courant);
    r.h.push_back(e.h);
    r.scalar_error.push_back(e.transport);
  }
  r.scalar_rate = observed_rates(r.h, r.scalar_error);
  return r;
}

std::string format_report_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os.precision(10);
  os << "case,h,velocity_error,pressure_error,scalar_error,velocity_rate,pressure_rate,scalar_rate\n";
  auto at = [](const std::vector<double>& v, std::size_t i) {
    if (i >= v.size()) return std::string();
    std::ostringstream s;
    s.precision(10);
    s << v[i];
    return s.str();
  };
  auto rate = [](const std::vector<std::optional<double>>& v, std::size_t i) {
    return i < v.size() ? format_optional(v[i]) : std::string();
  };
  for (std::size_t i = 0; i < report.h.size(); ++i) {
    os << report.name << ',' << report.h[i] << ',' << at(report.velocity_error, i) << ','
       << at(report.pressure_error, i) << ',' << at(report.scalar_error, i) << ','
       << rate(report.velocity_rate, i) << ',' << rate(report.pressure_rate, i) << ','
       << rate(report.scalar_rate, i) << '\n';
  }
  return os.str();
}

std::string format_report_text(const ConvergenceReport& report) {
  std::ostringstream os;
  os.precision(4);
  os << report.name << '\n';
  for (std::size_t i = 0; i < report.h.size(); ++i) {
    os << "  h = " << report.h[i];
    if (i < report.velocity_error.size()) {
      os << "  |u - u_h| = " << std::scientific << report.velocity_error[i] << std::defaultfloat;
      if (report.velocity_rate[i]) os << " (rate " << *report.velocity_rate[i] << ")";
    }
    if (i < report.pressure_error.size()) {
      os << "  |p - p_h| = " << std::scientific << report.pressure_error[i] << std::defaultfloat;
      if (report.pressure_rate[i]) os << " (rate " << *report.pressure_rate[i] << ")";
    }
    if (i < report.scalar_error.size()) {
      os << "  |b - b_h| = " << std::scientific << report.scalar_error[i] << std::defaultfloat;
      if (report.scalar_rate[i]) os << " (rate " << *report.scalar_rate[i] << ")";
    }
    os << '\n';
  }
  return os.str();
}

FdCheck fd_check(const std::function<double(double)>& f, double x, double step,
                 double analytic) {
  if (!(step > 0.0)) throw Error("finite-difference step must be positive");
  FdCheck c;
  c.estimate = (f(x + step) - f(x - step)) / (2.0 * step);
  c.analytic = analytic;
  c.abs_error = std::abs(c.estimate - analytic);
  c.rel_error = analytic != 0.0 ? c.abs_error / std::abs(analytic) : c.abs_error;
  return c;
}

double k_decay_closed_form(double c, double dt, double C3, double ell) {
  return c / (1.0 + dt * (C3 / ell) * std::sqrt(c));
}

}  // namespace brinkman
