#include <gtest/gtest.h>

#include <cmath>

#include "brinkman/config.hpp"
#include "brinkman/geometry.hpp"
#include "brinkman/solver.hpp"
#include "brinkman/verification.hpp"

using namespace brinkman;

namespace {

std::shared_ptr<const Mesh> channel(int nr = 6, int nz = 12) {
  return std::make_shared<const Mesh>(structured_box_mesh({0, 0}, {0.6, 2.0}, nr, nz));
}

SolverParams planar() {
  SolverParams p;
  p.mode = IntegrationMode::Planar;
  return p;
}

std::shared_ptr<const Mesh> single_outlet_triangle() {
  const TaggedEdge tags[] = {{0, 1, BoundaryTag::Outlet},
                             {1, 2, BoundaryTag::Outlet},
                             {2, 0, BoundaryTag::Outlet}};
  return std::make_shared<const Mesh>(
      Mesh::build({{0.1, 0.0}, {0.5, 0.1}, {0.2, 0.4}}, {{0, 1, 2}}, {RegionTag::Fluid}, tags));
}

SolverState constant_state(const FlowSolver& s, double k) {
  SolverState st;
  st.u = DiscreteField(s.velocity_space(), 2);
  st.p = DiscreteField(s.pressure_space(), 1);
  st.k = DiscreteField::interpolate(s.velocity_space(), 1,
                                    [k](const Point&) { return FieldValue{k, 0}; });
  return st;
}

// P2 edge mass in the order (a, b, midpoint).
void add_edge_mass(Eigen::MatrixXd& m, const std::vector<int>& dofs, double length) {
  const double e[3][3] = {{4, -1, 2}, {-1, 4, 2}, {2, 2, 16}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(dofs[i], dofs[j]) += length / 30.0 * e[i][j];
  }
}

double max_abs(const SparseMatrix& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  }
  return v;
}

}  // namespace

TEST(Residual, Norm) {
  const auto mesh = channel(1, 1);
  const auto space = std::make_shared<const FunctionSpace>(mesh, 2);
  DiscreteField a(space, 1);
  for (int i = 0; i < space->n_dofs(); ++i) a.at(0, i) = 0.1 * i;
  DiscreteField b = a;
  EXPECT_EQ(residual_norm(a, b), 0.0);
  b.at(0, 2) += 3.0;
  EXPECT_DOUBLE_EQ(residual_norm(a, b), 3.0);
  const DiscreteField other(std::make_shared<const FunctionSpace>(mesh, 1), 1);
  EXPECT_THROW(residual_norm(a, other), Error);
}

TEST(KStep, SingleElementDecay) {
  for (KScheme scheme : {KScheme::LowOrder, KScheme::Galerkin}) {
    for (IntegrationMode mode : {IntegrationMode::Planar, IntegrationMode::Axisymmetric}) {
      SolverParams p;
      p.mode = mode;
      p.k_scheme = scheme;
      const FlowSolver solver(single_outlet_triangle(), p, BoundaryConfig{});
      ASSERT_TRUE(solver.k_constraints().empty());
      const double c = 0.04;
      const double dt = 0.667;
      const KStepResult r = solver.k_step(constant_state(solver, c), dt);
      const double ell = solver.mixing_length()[0];
      const double expected = k_decay_closed_form(c, dt, p.turbulence.C3, ell);
      EXPECT_NEAR(expected, c / (1.0 + dt * (0.03 / ell) * std::sqrt(c)), 1e-15);
      for (double v : r.k.coefficients()) EXPECT_NEAR(v, expected, 1e-10);
      EXPECT_EQ(r.floored, 0);
      EXPECT_EQ(r.free_dofs, 6);
    }
  }
}

TEST(KStep, NoDissipationIsIdentity) {
  SolverParams p;
  p.turbulence.C3 = 0.0;
  const FlowSolver solver(single_outlet_triangle(), p, BoundaryConfig{});
  const KStepResult r = solver.k_step(constant_state(solver, 0.02), 0.5);
  for (double v : r.k.coefficients()) EXPECT_NEAR(v, 0.02, 1e-14);
}

TEST(KStep, BoundaryValues) {
  BoundaryConfig bc;
  bc.k_inlet = 0.0;
  bc.k_lateral = 0.01;
  const FlowSolver solver(channel(), SolverParams{}, bc);
  const SolverState s = solver.initial_state();
  for (double v : s.k.coefficients()) EXPECT_EQ(v, 0.01);
  const KStepResult r = solver.k_step(s, 0.667);
  const FunctionSpace& p2 = *solver.velocity_space();
  for (int d : p2.boundary_dofs(BoundaryTag::Inlet)) EXPECT_EQ(r.k.at(0, d), 0.0);
  for (int d : p2.boundary_dofs(BoundaryTag::Lateral)) {
    if (p2.dof_point(d).z > 0.0) EXPECT_EQ(r.k.at(0, d), 0.01);
  }
  EXPECT_GE(r.min_before_floor, -1e-12);
}

TEST(KStep, ZeroValueOutletConstrains) {
  BoundaryConfig bc;
  bc.k_outlet = KOutletCondition::ZeroValue;
  const FlowSolver solver(channel(), SolverParams{}, bc);
  const KStepResult r = solver.k_step(solver.initial_state(), 0.667);
  for (int d : solver.velocity_space()->boundary_dofs(BoundaryTag::Outlet)) {
    // The lateral value wins at the outer corner.
    if (solver.velocity_space()->dof_point(d).r < 0.6) EXPECT_EQ(r.k.at(0, d), 0.0);
  }
}

TEST(Stokes, UniformChannelIsUniform) {
  const FlowSolver solver(channel(), planar(), BoundaryConfig{});
  const VelocityPressure s = solver.solve_stokes();
  const FunctionSpace& p2 = *solver.velocity_space();
  for (int i = 0; i < p2.n_dofs(); ++i) {
    EXPECT_NEAR(s.u.at(0, i), 0.0, 1e-6);
    EXPECT_NEAR(s.u.at(1, i), 0.51, 1e-6);
  }
  EXPECT_LT(solver.divergence_residual(s.u), 1e-9);
}

TEST(Stokes, SolidLayerStopsTheFlow) {
  // Outer half of the channel is solid above z = 0.5; the flow diverts into the inner half.
  const Mesh base = structured_box_mesh({0, 0}, {0.6, 2.0}, 6, 12);
  std::vector<RegionTag> regions(base.n_triangles(), RegionTag::Fluid);
  for (int t = 0; t < base.n_triangles(); ++t) {
    if (base.centroid(t).r > 0.3 && base.centroid(t).z > 0.5) regions[t] = RegionTag::Catch;
  }
  const auto mesh = std::make_shared<const Mesh>(Mesh::build(base.vertices(), base.triangles(), regions));
  const FlowSolver solver(mesh, SolverParams{}, BoundaryConfig{});
  const VelocityPressure s = solver.solve_stokes();
  const FunctionSpace& p2 = *solver.velocity_space();
  double solid = 0.0;
  for (int i = 0; i < p2.n_dofs(); ++i) {
    const Point x = p2.dof_point(i);
    if (x.r <= 0.3 + 1e-9 || x.z < 0.6) continue;
    solid = std::max(solid, std::hypot(s.u.at(0, i), s.u.at(1, i)));
  }
  EXPECT_LT(solid, 1e-5 * 0.51);
}

TEST(Stokes, InitialTke) {
  const FlowSolver solver(channel(2, 4), SolverParams{}, BoundaryConfig{});
  const SolverState s = solver.initial_state();
  for (double v : s.k.coefficients()) EXPECT_EQ(v, 0.01);
  EXPECT_EQ(s.step, 0);
  EXPECT_EQ(s.time, 0.0);
}

TEST(NsStep, UniformFlowIsAFixedPoint) {
  for (IntegrationMode mode : {IntegrationMode::Planar, IntegrationMode::Axisymmetric}) {
    SolverParams p;
    p.mode = mode;
    const FlowSolver solver(channel(), p, BoundaryConfig{});
    const SolverState s = solver.initial_state();
    const VelocityPressure next = solver.ns_step(s, 0.667);
    EXPECT_LT(residual_norm(next.u, s.u), 1e-8);
  }
}

TEST(TimeLoop, UniformChannelSteadyWithinThreeSteps) {
  const FlowSolver solver(channel(), planar(), BoundaryConfig{});
  TimeLoopOptions o;
  o.max_steps = 3;
  o.stop_at_steady = false;
  const RunResult r = run_time_loop(solver, o);
  ASSERT_EQ(r.state.residual_history.size(), 3u);
  for (const ResidualRecord& rec : r.state.residual_history) EXPECT_LT(rec.r_u, 1e-8);
}

TEST(TimeLoop, ZeroStepsReturnsStokes) {
  const FlowSolver solver(channel(3, 6), SolverParams{}, BoundaryConfig{});
  TimeLoopOptions o;
  o.max_steps = 0;
  const RunResult r = run_time_loop(solver, o);
  const SolverState s = solver.initial_state();
  EXPECT_EQ(r.state.u.coefficients(), s.u.coefficients());
  EXPECT_EQ(r.state.p.coefficients(), s.p.coefficients());
  EXPECT_EQ(r.state.k.coefficients(), s.k.coefficients());
  EXPECT_TRUE(r.state.residual_history.empty());
  EXPECT_FALSE(r.steady);
}

TEST(TimeLoop, DeterministicResidualLog) {
  const auto mesh = std::make_shared<const Mesh>(generate_net_geometry([] {
    GeometryParams g;
    g.r_max = 1.0;
    g.z_max = 2.0;
    g.h = 0.1;
    g.h_fine = 0.05;
    g.obstacles = {{RegionTag::Catch, {{0.0, 0.8}, {0.3, 0.8}, {0.3, 1.1}, {0.0, 1.1}}}};
    return g;
  }()));
  const FlowSolver solver(mesh, SolverParams{}, BoundaryConfig{});
  TimeLoopOptions o;
  o.max_steps = 3;
  o.stop_at_steady = false;
  const RunResult a = run_time_loop(solver, o);
  const RunResult b = run_time_loop(solver, o);
  ASSERT_EQ(a.state.residual_history.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.state.residual_history[i].r_u, b.state.residual_history[i].r_u);
    EXPECT_EQ(a.state.residual_history[i].r_k, b.state.residual_history[i].r_k);
  }
  EXPECT_GT(a.state.residual_history[0].r_u, 0.0);
  for (const StepDiagnostics& d : a.diagnostics) EXPECT_GE(d.min_k_before_floor, -1e-12);
}

TEST(TimeLoop, RejectsNonPositiveStep) {
  const FlowSolver solver(channel(2, 4), SolverParams{}, BoundaryConfig{});
  TimeLoopOptions o;
  o.dt = -1.0;
  EXPECT_THROW(run_time_loop(solver, o), ConfigError);
}

TEST(Constraints, InletWinsAtCorners) {
  BoundaryConfig bc;
  bc.lateral = LateralCondition::NoSlip;
  const FlowSolver solver(channel(2, 4), SolverParams{}, bc);
  const FunctionSpace& p2 = *solver.velocity_space();
  const int n = p2.n_dofs();
  for (const DirichletValue& c : solver.velocity_constraints()) {
    const Point x = p2.dof_point(c.dof % n);
    if (x.z == 0.0 && c.dof >= n) EXPECT_EQ(c.value, 0.51);
  }
}

TEST(Constraints, PoiseuilleInlet) {
  BoundaryConfig bc;
  bc.inlet = InletProfile::Poiseuille;
  bc.D = 2.0;
  bc.alpha = 0.6;
  EXPECT_DOUBLE_EQ(bc.inlet_speed(0.3, 0.6), 2.0 * 0.3 * 0.3);
  const FlowSolver solver(channel(3, 4), SolverParams{}, bc);
  const FunctionSpace& p2 = *solver.velocity_space();
  const int n = p2.n_dofs();
  int checked = 0;
  for (const DirichletValue& c : solver.velocity_constraints()) {
    const Point x = p2.dof_point(c.dof % n);
    if (x.z == 0.0 && c.dof >= n) {
      EXPECT_NEAR(c.value, 2.0 * x.r * (0.6 - x.r), 1e-15);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 7);
  EXPECT_NEAR(solver.max_inlet_speed(), 2.0 * 0.09, 1e-15);
}

TEST(Ghost, OutgoingFlowHasNoMatrixTerm) {
  BoundaryConfig bc;
  bc.outlet = OutletCondition::Ghost;
  const FlowSolver solver(channel(), planar(), bc);
  const DiscreteField u = DiscreteField::interpolate(
      solver.velocity_space(), 2, [](const Point& x) { return FieldValue{0.1 * x.r, 0.3 + x.r}; });
  const auto zero = [](const Point&) { return FieldValue{0, 0}; };
  const GhostContribution g = solver.assemble_ghost_outlet(u, zero);
  EXPECT_LT(max_abs(g.matrix), 1e-12);
  EXPECT_LT(g.rhs.cwiseAbs().maxCoeff(), 1e-12);
  // With the inflow profile as outlet datum only (u.n) u_I remains.
  const GhostContribution h = solver.assemble_ghost_outlet(u);
  EXPECT_LT(max_abs(h.matrix), 1e-12);
  EXPECT_GT(h.rhs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ghost, ZeroFieldGivesNothing) {
  BoundaryConfig bc;
  bc.outlet = OutletCondition::Ghost;
  const FlowSolver solver(channel(), planar(), bc);
  const DiscreteField u(solver.velocity_space(), 2);
  const GhostContribution g = solver.assemble_ghost_outlet(u);
  EXPECT_EQ(max_abs(g.matrix), 0.0);
  EXPECT_EQ(g.rhs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ghost, BackflowGivesHalfBoundaryMass) {
  BoundaryConfig bc;
  bc.outlet = OutletCondition::Ghost;
  const FlowSolver solver(channel(), planar(), bc);
  const FunctionSpace& p2 = *solver.velocity_space();
  const DiscreteField u =
      DiscreteField::interpolate(solver.velocity_space(), 2, [](const Point&) { return FieldValue{0, -1}; });
  const GhostContribution g =
      solver.assemble_ghost_outlet(u, [](const Point&) { return FieldValue{0, 0}; });
  const int n = p2.n_dofs();
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (const BoundaryEdge& e : solver.mesh().boundary_edges()) {
    if (e.tag != BoundaryTag::Outlet) continue;
    const std::vector<int> d = p2.edge_dofs(e);
    const double len = norm(solver.mesh().vertex(e.b) - solver.mesh().vertex(e.a));
    add_edge_mass(ref, d, len);
    add_edge_mass(ref, {d[0] + n, d[1] + n, d[2] + n}, len);
  }
  EXPECT_LT((Eigen::MatrixXd(g.matrix) - 0.5 * ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(g.rhs.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ghost, UniformChannelMatchesNatural) {
  BoundaryConfig ghost;
  ghost.outlet = OutletCondition::Ghost;
  // The outlet traction shifts p by a constant, which only reaches u through the pressure penalty.
  SolverParams params = planar();
  params.pressure_penalty = 1e-10;
  const FlowSolver a(channel(), params, BoundaryConfig{});
  const FlowSolver b(channel(), params, ghost);
  const SolverState sa = a.initial_state();
  const SolverState sb = b.initial_state();
  const VelocityPressure na = a.ns_step(sa, 0.667);
  const VelocityPressure nb = b.ns_step(sb, 0.667);
  double diff = 0.0;
  for (std::size_t i = 0; i < na.u.coefficients().size(); ++i) {
    diff = std::max(diff, std::abs(na.u.coefficients()[i] - nb.u.coefficients()[i]));
  }
  EXPECT_LT(diff, 1e-8);
}

TEST(Solver, RejectsNegativeRadiusInAxisymmetricMode) {
  const auto mesh = std::make_shared<const Mesh>(structured_box_mesh({-1, 0}, {1, 1}, 2, 2));
  EXPECT_THROW(FlowSolver(mesh, SolverParams{}, BoundaryConfig{}), GeometryError);
  EXPECT_NO_THROW(FlowSolver(mesh, planar(), BoundaryConfig{}));
}

TEST(Solver, BundledFirstStepIsFiniteAndSolenoidal) {
  RunConfig c;
  const auto mesh = std::make_shared<const Mesh>(build_mesh(c));
  const FlowSolver solver(mesh, c.solver, c.bc);
  const SolverState s = solver.initial_state();
  const VelocityPressure next = solver.ns_step(s, c.dt);
  EXPECT_TRUE(next.u.all_finite());
  EXPECT_TRUE(next.p.all_finite());
  EXPECT_LT(solver.divergence_residual(next.u), 1e-5);
}
