#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

#include "brinkman/config.hpp"
#include "brinkman/geometry.hpp"
#include "brinkman/output.hpp"
#include "brinkman/verification.hpp"

using namespace brinkman;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  %2d %-34s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const SparseMatrix& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  }
  return v;
}

struct BundledRun {
  RunResult result;
  SolverState steady_state;
  int steady_step = 0;
  double seconds = 0.0;
  double seconds_to_steady = 0.0;
};

BundledRun run_bundled(const RunConfig& c) {
  BundledRun out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto mesh = std::make_shared<const Mesh>(build_mesh(c));
  const FlowSolver solver(mesh, c.solver, c.bc);
  TimeLoopOptions o = c.loop_options();
  o.stop_at_steady = false;
  o.on_step = [&](const SolverState& s, const StepDiagnostics&) {
    const ResidualRecord& r = s.residual_history.back();
    if (out.steady_step == 0 && r.r_u < c.tol_u && r.r_k < c.tol_k) {
      out.steady_step = r.step;
      out.steady_state = s;
      out.seconds_to_steady = seconds_since(t0);
    }
  };
  out.result = run_time_loop(solver, o);
  out.seconds = seconds_since(t0);
  std::printf("      bundled run: %d vertices, %d steps in %.1f s\n", mesh->n_vertices(),
              out.result.state.step, out.seconds);
  return out;
}

double mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += v[i];
  return s / static_cast<double>(end - begin);
}

void residual_reproduction(const BundledRun& run) {
  const auto& h = run.result.state.residual_history;
  std::vector<double> ru, rk;
  for (const auto& r : h) {
    ru.push_back(r.r_u);
    rk.push_back(r.r_k);
  }
  bool decreasing = h.size() >= 15;
  if (decreasing) {
    decreasing = mean(ru, h.size() - 10, h.size()) < mean(ru, 0, 5) &&
                 mean(rk, h.size() - 10, h.size()) < mean(rk, 0, 5);
  }
  const bool steady = run.steady_step > 0 && run.steady_step <= 80;
  const bool fast = run.seconds_to_steady < 300.0;
  double ru_s = 0.0, rk_s = 0.0;
  if (steady) {
    ru_s = h[run.steady_step - 1].r_u;
    rk_s = h[run.steady_step - 1].r_k;
  }
  report(1, "residual reproduction", decreasing && steady && fast,
         fmt("steady at step %d (r_u = %.3e, r_k = %.3e) after %.1f s; mean r_u first 5 %.3e, "
             "last 10 %.3e",
             run.steady_step, ru_s, rk_s, run.seconds_to_steady, mean(ru, 0, 5),
             mean(ru, h.size() - 10, h.size())));
}

void wake_structure(const BundledRun& run) {
  if (run.steady_step == 0) {
    report(2, "wake structure", false, "no converged state");
    return;
  }
  const SolverState& s = run.steady_state;
  const Mesh& mesh = s.u.space().mesh();
  double axis_min = 1e9, axis_max = -1e9;
  for (int i = 0; i <= 200; ++i) {
    const double z = 1.0 + 1.0 * i / 200.0;
    const auto v = evaluate_field(s.u, {0.0, std::min(z, mesh.max_corner().z)});
    if (!v) continue;
    axis_min = std::min(axis_min, (*v)[1]);
    axis_max = std::max(axis_max, (*v)[1]);
  }
  const bool recirculation = axis_min < 0.0 && axis_max > 0.0;

  // Membrane band centre line r(z) for z in [0.1, 0.75].
  int chords = 0, minima = 0;
  std::string where;
  for (double z : RunConfig{}.profile_z) {
    if (z <= 0.1 || z >= 0.75) continue;
    ++chords;
    const double rc = 0.15 + 0.075 * (z - 0.1) / 0.65;
    const int n = 101;
    std::vector<double> uz(n);
    for (int i = 0; i < n; ++i) uz[i] = (*evaluate_field(s.u, {rc - 0.05 + 0.1 * i / (n - 1), z}))[1];
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (uz[i] < uz[best]) best = i;
    }
    const bool interior = best > 0 && best < n - 1 && uz[best] < uz[best - 1] && uz[best] < uz[best + 1];
    if (interior) ++minima;
    where += fmt(" z=%.2f:%s", z, interior ? "min" : "none");
  }
  report(2, "wake structure", recirculation && chords > 0 && minima == chords,
         fmt("axis u_z behind catch in [%.3f, %.3f];%s", axis_min, axis_max, where.c_str()));
}

double block_speed(double K_solid, double* seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const Mesh base = structured_box_mesh({0, 0}, {1.0, 2.0}, 20, 40);
  auto inside = [](const Point& x, double eps) {
    return x.r > 0.3 + eps && x.r < 0.7 - eps && x.z > 0.8 + eps && x.z < 1.2 - eps;
  };
  std::vector<RegionTag> regions(base.n_triangles(), RegionTag::Fluid);
  for (int t = 0; t < base.n_triangles(); ++t) {
    if (inside(base.centroid(t), 0.0)) regions[t] = RegionTag::Catch;
  }
  const auto mesh = std::make_shared<const Mesh>(Mesh::build(base.vertices(), base.triangles(), regions));
  SolverParams p;
  p.mode = IntegrationMode::Planar;
  p.permeability.K[RegionTag::Catch] = K_solid;
  const FlowSolver solver(mesh, p, BoundaryConfig{});
  TimeLoopOptions o;
  o.max_steps = 20;
  const RunResult r = run_time_loop(solver, o);
  const FunctionSpace& p2 = *solver.velocity_space();
  double speed = 0.0;
  for (int i = 0; i < p2.n_dofs(); ++i) {
    if (!inside(p2.dof_point(i), 1e-9)) continue;
    speed = std::max(speed, std::hypot(r.state.u.at(0, i), r.state.u.at(1, i)));
  }
  *seconds = seconds_since(t0);
  return speed;
}

void penalization_efficacy() {
  double t6 = 0.0, t7 = 0.0;
  const double u6 = block_speed(1e-6, &t6);
  const double u7 = block_speed(1e-7, &t7);
  const double inlet = 0.51;
  report(3, "penalization efficacy", u6 < 1e-3 * inlet && u7 < u6 && t6 < 30.0,
         fmt("max |u| in block %.3e (coef 1e6), %.3e (coef 1e7); limit %.3e; %.1f s", u6, u7,
             1e-3 * inlet, t6));
}

void eddy_viscosity_regularity() {
  double worst_c0 = 0.0, worst_slope_rel = 0.0, worst_slope_abs = 0.0;
  for (double ell : {0.005, 0.02, 0.05, 0.1}) {
    TurbulenceParams p;
    p.resolve_v2(ell);
    const auto nut = [&](double k) { return eddy_viscosity_blended(k, ell, p); };
    const double kc = p.k_c;
    const double v1 = p.nu0 + ell * std::sqrt(p.tau + kc);
    worst_c0 = std::max(worst_c0, std::abs(nut(std::nextafter(kc, 2 * kc)) - v1) / v1);
    worst_c0 = std::max(worst_c0, std::abs(nut(kc) - v1) / v1);
    worst_c0 = std::max(worst_c0, std::abs(nut(std::nextafter(kc + 1.0, 0.0)) - p.v2) / p.v2);
    worst_c0 = std::max(worst_c0, std::abs(nut(kc + 1.0) - p.v2) / p.v2);
    const double slope = ell / (2.0 * std::sqrt(p.tau + kc));
    worst_slope_rel = std::max(worst_slope_rel, fd_check(nut, kc, 1e-7, slope).rel_error);
    worst_slope_abs = std::max(worst_slope_abs, fd_check(nut, kc + 1.0, 1e-7, 0.0).abs_error);
  }
  report(4, "eddy-viscosity regularity",
         worst_c0 < 1e-10 && worst_slope_rel < 1e-6 && worst_slope_abs < 1e-6,
         fmt("C0 mismatch %.2e; slope error at k_c %.2e rel, at k_c+1 %.2e abs", worst_c0,
             worst_slope_rel, worst_slope_abs));
}

void stokes_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport r = convergence_study(stokes_trig_case(), {8, 16, 32});
  const double t = seconds_since(t0);
  const auto& vr = r.velocity_rate;
  const auto& pr = r.pressure_rate;
  const bool ok = vr[2] && pr[2] && *vr[2] >= 2.5 && *pr[2] >= 1.5 && t < 120.0;
  report(5, "Stokes MMS convergence", ok,
         fmt("velocity rates %.2f, %.2f; pressure rates %.2f, %.2f; %.1f s", vr[1].value_or(NAN),
             vr[2].value_or(NAN), pr[1].value_or(NAN), pr[2].value_or(NAN), t));
}

void characteristic_transport() {
  const AdvectionErrors e = advection_case(32, 1.0);
  const auto mesh = std::make_shared<const Mesh>(structured_box_mesh({0, 0}, {1, 1}, 32, 32));
  const auto p2 = std::make_shared<const FunctionSpace>(mesh, 2);
  const DiscreteField b = DiscreteField::interpolate(p2, 1, [](const Point& x) {
    return FieldValue{std::exp(-(std::pow(x.r - 0.5, 2) + std::pow(x.z - 0.5, 2)) / 0.02), 0};
  });
  const DiscreteField zero(p2, 2);
  const bool identity = compose_field(b, zero, 0.667).coefficients() == b.coefficients();
  report(6, "characteristic transport", e.transport <= 2.0 * e.interpolation && identity,
         fmt("transport error %.3e, interpolation error %.3e (ratio %.2f); zero velocity %s",
             e.transport, e.interpolation, e.transport / e.interpolation,
             identity ? "bitwise identity" : "NOT identity"));
}

void ghost_consistency() {
  BoundaryConfig bc;
  bc.outlet = OutletCondition::Ghost;
  SolverParams p;
  p.mode = IntegrationMode::Planar;
  const FlowSolver solver(std::make_shared<const Mesh>(structured_box_mesh({0, 0}, {0.6, 2.0}, 6, 12)), p, bc);
  const auto zero = [](const Point&) { return FieldValue{0, 0}; };
  const DiscreteField outgoing = DiscreteField::interpolate(
      solver.velocity_space(), 2, [](const Point& x) { return FieldValue{0.2 * x.r, 0.1 + x.r * x.r}; });
  const double out_max = max_abs(solver.assemble_ghost_outlet(outgoing, zero).matrix);

  const DiscreteField back = DiscreteField::interpolate(solver.velocity_space(), 2,
                                                        [](const Point&) { return FieldValue{0, -1}; });
  const SparseMatrix g = solver.assemble_ghost_outlet(back, zero).matrix;
  // Independent P2 edge mass (a, b, midpoint) per component.
  const FunctionSpace& p2 = *solver.velocity_space();
  const int n = p2.n_dofs();
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  const double e[3][3] = {{4, -1, 2}, {-1, 4, 2}, {2, 2, 16}};
  for (const BoundaryEdge& be : solver.mesh().boundary_edges()) {
    if (be.tag != BoundaryTag::Outlet) continue;
    const auto d = p2.edge_dofs(be);
    const double len = norm(solver.mesh().vertex(be.b) - solver.mesh().vertex(be.a));
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) ref(d[i] + c * n, d[j] + c * n) += 0.5 * len / 30.0 * e[i][j];
      }
    }
  }
  const double diff = (Eigen::MatrixXd(g) - ref).cwiseAbs().maxCoeff();
  report(7, "ghost-BC laminar consistency", out_max < 1e-12 && diff < 1e-12,
         fmt("outgoing max entry %.2e; backflow vs half boundary mass %.2e", out_max, diff));
}

void tke_positivity(const BundledRun& run) {
  int counted = 0, good = 0;
  double worst = 0.0;
  for (const StepDiagnostics& d : run.result.diagnostics) {
    if (d.step <= 5 || d.step > 50) continue;
    ++counted;
    if (d.min_k_before_floor >= -1e-12) ++good;
    worst = std::min(worst, d.min_k_before_floor);
  }
  const double fraction = counted > 0 ? static_cast<double>(good) / counted : 0.0;

  const TaggedEdge tags[] = {{0, 1, BoundaryTag::Outlet}, {1, 2, BoundaryTag::Outlet}, {2, 0, BoundaryTag::Outlet}};
  const auto tri = std::make_shared<const Mesh>(
      Mesh::build({{0.1, 0.0}, {0.5, 0.1}, {0.2, 0.4}}, {{0, 1, 2}}, {RegionTag::Fluid}, tags));
  const FlowSolver solver(tri, SolverParams{}, BoundaryConfig{});
  const double c = 0.04, dt = 0.667;
  SolverState s;
  s.u = DiscreteField(solver.velocity_space(), 2);
  s.p = DiscreteField(solver.pressure_space(), 1);
  s.k = DiscreteField::interpolate(solver.velocity_space(), 1, [c](const Point&) { return FieldValue{c, 0}; });
  const KStepResult r = solver.k_step(s, dt);
  const double expected = c / (1.0 + dt * (0.03 / solver.mixing_length()[0]) * std::sqrt(c));
  double decay_err = 0.0;
  for (double v : r.k.coefficients()) decay_err = std::max(decay_err, std::abs(v - expected));

  report(8, "TKE positivity and dissipation", counted == 45 && fraction >= 0.99 && decay_err < 1e-10,
         fmt("%d/%d steps in 6..50 with min k >= -1e-12 (worst %.2e); decay error %.2e", good,
             counted, worst, decay_err));
}

void axisymmetric_quadrature() {
  const double R = 0.6, H = 2.0;
  const auto one = [](const QuadPoint&, std::span<const double>) { return 1.0; };
  const Mesh cyl = structured_box_mesh({0, 0}, {R, H}, 7, 13);
  const double v_cyl = integrate_functional(cyl, one, {}, IntegrationMode::Axisymmetric);

  // Cone r <= R (1 - z / H) triangulated on a structured grid of the meridian triangle.
  const int n = 9;
  std::vector<Point> v;
  std::vector<std::array<int, 3>> t;
  auto id = [n](int i, int j) { return j * (n + 1) - j * (j - 1) / 2 + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i + j <= n; ++i) v.push_back({R * i / n, H * j / n});
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i + j < n; ++i) {
      t.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      if (i + j + 1 < n) t.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  const Mesh cone = Mesh::build(v, t, std::vector<RegionTag>(t.size(), RegionTag::Fluid));
  const double v_cone = integrate_functional(cone, one, {}, IntegrationMode::Axisymmetric);

  // |r| pi measure: half of the solid of revolution.
  const double a_cyl = kPi * R * R * H / 2.0;
  const double a_cone = kPi * R * R * H / 6.0;
  const double e_cyl = std::abs(v_cyl - a_cyl) / a_cyl;
  const double e_cone = std::abs(v_cone - a_cone) / a_cone;
  report(9, "axisymmetric quadrature", e_cyl < 1e-12 && e_cone < 1e-12,
         fmt("cylinder rel error %.2e, cone rel error %.2e", e_cyl, e_cone));
}

void energy_boundedness(const BundledRun& run) {
  double early = 0.0, peak = 0.0;
  for (const StepDiagnostics& d : run.result.diagnostics) {
    if (d.step <= 5) early = std::max(early, d.kinetic_energy);
    peak = std::max(peak, d.kinetic_energy);
  }
  const bool ok = early > 0.0 && run.result.diagnostics.size() > 5 && peak <= 10.0 * early;
  report(10, "energy boundedness", ok,
         fmt("max kinetic energy %.4e vs 10 x first-5-step max %.4e", peak, 10.0 * early));
}

}  // namespace

int main(int argc, char** argv) {
  setenv("BRINKMAN_RANS_THREADS", "1", 0);
  RunConfig config;
  if (argc > 1) config = parse_config(argv[1]);
  try {
    const BundledRun run = run_bundled(config);
    residual_reproduction(run);
    wake_structure(run);
    penalization_efficacy();
    eddy_viscosity_regularity();
    stokes_convergence();
    characteristic_transport();
    ghost_consistency();
    tke_positivity(run);
    axisymmetric_quadrature();
    energy_boundedness(run);
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance suite aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
