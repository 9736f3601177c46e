#include "brinkman/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace brinkman {

double BoundaryConfig::inlet_speed(double r, double r_max) const {
  if (inlet == InletProfile::Uniform) return U0;
  const double width = alpha > 0.0 ? alpha : r_max;
  return D * r * (width - r);
}

void BoundaryConfig::validate() const {
  if (inlet == InletProfile::Uniform && !std::isfinite(U0)) throw ConfigError("bc.U0 must be finite");
  if (inlet == InletProfile::Poiseuille && !(D > 0.0)) {
    throw ConfigError("bc.D must be positive for a Poiseuille inlet");
  }
  if (!(k_inlet >= 0.0) || !(k_lateral >= 0.0)) {
    throw ConfigError("boundary TKE values must be non-negative");
  }
}

double residual_norm(const DiscreteField& f_new, const DiscreteField& f_old) {
  if (&f_new.space() != &f_old.space() || f_new.components() != f_old.components()) {
    throw Error("residual_norm needs fields on the same space");
  }
  double s = 0.0;
  const auto& a = f_new.coefficients();
  const auto& b = f_old.coefficients();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

FlowSolver::FlowSolver(std::shared_ptr<const Mesh> mesh, SolverParams params, BoundaryConfig bc)
    : mesh_(std::move(mesh)), params_(std::move(params)), bc_(bc) {
  if (!mesh_) throw Error("solver needs a mesh");
  if (params_.mode == IntegrationMode::Axisymmetric) {
    for (const Point& v : mesh_->vertices()) {
      if (v.r < 0.0) throw GeometryError("axisymmetric mode needs r >= 0 at every vertex");
    }
  }
  bc_.validate();
  if (params_.substeps < 1) throw ConfigError("solver.substeps must be >= 1");
  if (!(params_.pressure_penalty >= 0.0)) throw ConfigError("pressure_penalty must be >= 0");
  p2_ = std::make_shared<FunctionSpace>(mesh_, 2);
  p1_ = std::make_shared<FunctionSpace>(mesh_, 1);
  ell_ = longest_edge_field(*mesh_);
  const double max_ell = *std::max_element(ell_.begin(), ell_.end());
  params_.turbulence.resolve_v2(max_ell);
  params_.turbulence.validate(max_ell);
  penalty_ = coefficient_field(*mesh_, params_.permeability);

  const IntegrationMode mode = params_.mode;
  WeakForm vmass{Kernel::VectorMass, {}, BoundaryTag::Outlet, 1, 5};
  mass_u_ = assemble_bilinear(*p2_, *p2_, vmass, mode);
  WeakForm smass{Kernel::Mass, {}, BoundaryTag::Outlet, 1, 5};
  mass_k_ = assemble_bilinear(*p2_, *p2_, smass, mode);
  mass_p_ = assemble_bilinear(*p1_, *p1_, smass, mode);
  penalty_u_ = assemble_penalty(*p2_, penalty_, mode);
  WeakForm div{Kernel::PressureDivergence, {}, BoundaryTag::Outlet, 1, 5};
  divergence_ = assemble_bilinear(*p2_, *p1_, div, mode);
}

double FlowSolver::max_inlet_speed() const {
  double best = 0.0;
  for (int d : p2_->boundary_dofs(BoundaryTag::Inlet)) {
    best = std::max(best, std::abs(bc_.inlet_speed(p2_->dof_point(d).r, mesh_->max_corner().r)));
  }
  return best;
}

std::vector<DirichletValue> FlowSolver::velocity_constraints() const {
  const int n = p2_->n_dofs();
  const bool axi = params_.mode == IntegrationMode::Axisymmetric;
  std::map<int, double> values;
  auto set_edges = [&](BoundaryTag tag, auto&& fn) {
    for (const BoundaryEdge& be : mesh_->boundary_edges()) {
      BoundaryTag effective = be.tag;
      if (!axi && effective == BoundaryTag::Axis) effective = BoundaryTag::Lateral;
      if (effective != tag) continue;
      for (int d : p2_->edge_dofs(be)) fn(d);
    }
  };
  set_edges(BoundaryTag::Lateral, [&](int d) {
    values[d] = 0.0;
    if (bc_.lateral == LateralCondition::NoSlip) values[n + d] = 0.0;
  });
  set_edges(BoundaryTag::Axis, [&](int d) { values[d] = 0.0; });
  const double r_max = mesh_->max_corner().r;
  set_edges(BoundaryTag::Inlet, [&](int d) {
    values[d] = 0.0;
    values[n + d] = bc_.inlet_speed(p2_->dof_point(d).r, r_max);
  });
  std::vector<DirichletValue> out;
  out.reserve(values.size());
  for (const auto& [dof, v] : values) out.push_back({dof, v});
  return out;
}

std::vector<DirichletValue> FlowSolver::k_constraints() const {
  const bool axi = params_.mode == IntegrationMode::Axisymmetric;
  std::map<int, double> values;
  auto set_edges = [&](BoundaryTag tag, double value) {
    for (const BoundaryEdge& be : mesh_->boundary_edges()) {
      BoundaryTag effective = be.tag;
      if (!axi && effective == BoundaryTag::Axis) effective = BoundaryTag::Lateral;
      if (effective != tag) continue;
      for (int d : p2_->edge_dofs(be)) values[d] = value;
    }
  };
  if (bc_.k_outlet == KOutletCondition::ZeroValue) set_edges(BoundaryTag::Outlet, 0.0);
  set_edges(BoundaryTag::Lateral, bc_.k_lateral);
  set_edges(BoundaryTag::Inlet, bc_.k_inlet);
  std::vector<DirichletValue> out;
  for (const auto& [dof, v] : values) out.push_back({dof, v});
  return out;
}

GhostContribution FlowSolver::assemble_ghost_outlet(const DiscreteField& u_prev) const {
  const double r_max = mesh_->max_corner().r;
  return assemble_ghost_outlet(u_prev, [this, r_max](const Point& x) {
    return FieldValue{0.0, bc_.inlet_speed(x.r, r_max)};
  });
}

GhostContribution FlowSolver::assemble_ghost_outlet(
    const DiscreteField& u_prev, const std::function<FieldValue(const Point&)>& u_in) const {
  const Mesh& mesh = *mesh_;
  auto normal_velocity = [&](const QuadPoint& qp) {
    const auto l = mesh.barycentric(qp.triangle, qp.x);
    const FieldValue u = u_prev.value_in_cell(qp.triangle, l);
    return u[0] * qp.normal.r + u[1] * qp.normal.z;
  };
  WeakForm form;
  form.kernel = Kernel::BoundaryMass;
  form.boundary = BoundaryTag::Outlet;
  form.components = 2;
  form.coefficient = [&](const QuadPoint& qp) {
    return 0.5 * std::max(-normal_velocity(qp), 0.0);
  };
  GhostContribution g;
  g.matrix = assemble_bilinear(*p2_, *p2_, form, params_.mode);
  g.rhs = assemble_boundary_load(
      *p2_, 2, BoundaryTag::Outlet,
      [&](const QuadPoint& qp) {
        const double un = normal_velocity(qp);
        const double factor = 0.5 * std::max(-un, 0.0) + un;
        const FieldValue ui = u_in(qp.x);
        return FieldValue{factor * ui[0], factor * ui[1]};
      },
      params_.mode);
  return g;
}

SparseSystem FlowSolver::build_momentum_system(const SparseMatrix& a,
                                               const Vector& momentum_rhs) const {
  const int nu = 2 * p2_->n_dofs();
  const int np = p1_->n_dofs();
  Triplets triplets;
  triplets.reserve(a.nonZeros() + 2 * divergence_.nonZeros() + mass_p_.nonZeros());
  add_block(triplets, a, 0, 0);
  add_block(triplets, divergence_, nu, 0);
  const SparseMatrix bt = divergence_.transpose();
  add_block(triplets, bt, 0, nu);
  if (params_.pressure_penalty > 0.0) add_block(triplets, mass_p_, nu, nu, -params_.pressure_penalty);
  SparseSystem system;
  system.matrix.resize(nu + np, nu + np);
  system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system.rhs = Vector::Zero(nu + np);
  system.rhs.head(nu) = momentum_rhs;
  const auto constraints = velocity_constraints();
  apply_dirichlet(system, constraints);
  return system;
}

VelocityPressure FlowSolver::split(const Vector& x) const {
  const int nu = 2 * p2_->n_dofs();
  const int np = p1_->n_dofs();
  VelocityPressure out{DiscreteField(p2_, 2), DiscreteField(p1_, 1)};
  std::copy(x.data(), x.data() + nu, out.u.coefficients().begin());
  std::copy(x.data() + nu, x.data() + nu + np, out.p.coefficients().begin());
  return out;
}

VelocityPressure FlowSolver::solve_stokes() const {
  const double nu0 = params_.turbulence.nu0;
  WeakForm visc{Kernel::SymmetricGradient, [nu0](const QuadPoint&) { return nu0; },
                BoundaryTag::Outlet, 1, 5};
  SparseMatrix a = assemble_bilinear(*p2_, *p2_, visc, params_.mode);
  a += penalty_u_;
  Vector rhs = Vector::Zero(2 * p2_->n_dofs());
  if (bc_.outlet == OutletCondition::Ghost) {
    const double r_max = mesh_->max_corner().r;
    const DiscreteField frozen = DiscreteField::interpolate(p2_, 2, [&](const Point& x) {
      return FieldValue{0.0, bc_.inlet_speed(x.r, r_max)};
    });
    const GhostContribution g = assemble_ghost_outlet(frozen);
    a += g.matrix;
    rhs += g.rhs;
  }
  const SparseSystem system = build_momentum_system(a, rhs);
  return split(solve(system, params_.linear));
}

SolverState FlowSolver::initial_state() const {
  VelocityPressure up = solve_stokes();
  SolverState state;
  state.u = std::move(up.u);
  state.p = std::move(up.p);
  state.k = DiscreteField(p2_, 1);
  std::fill(state.k.coefficients().begin(), state.k.coefficients().end(), params_.k_initial);
  return state;
}

VelocityPressure FlowSolver::ns_step(const SolverState& state, const DiscreteField& k_visc,
                                     double dt, const std::vector<TracePoint>& traces) const {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const SchemeCoefficientField coeffs(k_visc, ell_, params_.turbulence);
  WeakForm visc{Kernel::SymmetricGradient,
                [&coeffs](const QuadPoint& qp) { return coeffs.at(qp).viscosity; },
                BoundaryTag::Outlet, 1, 5};
  SparseMatrix a = assemble_bilinear(*p2_, *p2_, visc, params_.mode);
  a += mass_u_ / dt;
  a += penalty_u_;
  const DiscreteField advected = compose_traced(state.u, traces, params_.limiter);
  const Eigen::Map<const Vector> ux(advected.coefficients().data(),
                                    static_cast<Eigen::Index>(advected.coefficients().size()));
  Vector rhs = mass_u_ * ux / dt;
  if (bc_.outlet == OutletCondition::Ghost) {
    const GhostContribution g = assemble_ghost_outlet(state.u);
    a += g.matrix;
    rhs += g.rhs;
  }
  const SparseSystem system = build_momentum_system(a, rhs);
  return split(solve(system, params_.linear));
}

VelocityPressure FlowSolver::ns_step(const SolverState& state, double dt) const {
  const auto traces = trace_dofs(*p2_, state.u, dt, params_.substeps);
  return ns_step(state, state.k, dt, traces);
}

KStepResult FlowSolver::k_step(const SolverState& state, double dt,
                               const std::vector<TracePoint>& traces) const {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const TurbulenceParams& tp = params_.turbulence;
  const SchemeCoefficientField coeffs(state.k, ell_, tp);
  const bool axi = params_.mode == IntegrationMode::Axisymmetric;
  const DiscreteField& u = state.u;

  // 1/2 C1 l sqrt(k^m) |grad u + grad u^T|^2
  auto production = [&](const QuadPoint& qp) {
    const Point gr = u.gradient_in_cell(0, qp.triangle, qp.bary);
    const Point gz = u.gradient_in_cell(1, qp.triangle, qp.bary);
    const double off = gr.z + gz.r;
    double s2 = 4.0 * gr.r * gr.r + 2.0 * off * off + 4.0 * gz.z * gz.z;
    if (axi) {
      const double ur = u.value_in_cell(qp.triangle, qp.bary)[0];
      s2 += 4.0 * ur * ur / (qp.x.r * qp.x.r);
    }
    return 0.5 * tp.C1 * ell_[qp.triangle] * std::sqrt(coeffs.k_at(qp)) * s2;
  };

  auto diffusivity = [&](const QuadPoint& qp) { return coeffs.at(qp).diffusivity; };
  auto reaction = [&](const QuadPoint& qp) {
    double c = coeffs.at(qp).dissipation;
    if (params_.production == ProductionForm::ImplicitRatio) c -= production(qp) / coeffs.k_at(qp);
    return c;
  };
  const bool explicit_source = params_.production == ProductionForm::Explicit;
  const DiscreteField advected = compose_traced(state.k, traces, params_.limiter);
  const Eigen::Map<const Vector> kx(advected.coefficients().data(),
                                    static_cast<Eigen::Index>(advected.coefficients().size()));
  SparseSystem system;
  if (params_.k_scheme == KScheme::LowOrder) {
    const LowOrderScalarForms forms =
        assemble_low_order(*p2_, diffusivity, reaction,
                           explicit_source ? Coefficient(production) : Coefficient(),
                           params_.mode);
    system.matrix = forms.diffusion;
    const Vector diag = forms.mass / dt + forms.reaction;
    for (int i = 0; i < p2_->n_dofs(); ++i) system.matrix.coeffRef(i, i) += diag[i];
    system.rhs = forms.mass.cwiseProduct(kx) / dt + forms.source;
  } else {
    WeakForm diffusion{Kernel::Stiffness, diffusivity, BoundaryTag::Outlet, 1, 5};
    WeakForm mass_term{Kernel::Mass, reaction, BoundaryTag::Outlet, 1, 5};
    system.matrix = mass_k_ / dt;
    system.matrix += assemble_bilinear(*p2_, *p2_, diffusion, params_.mode);
    system.matrix += assemble_bilinear(*p2_, *p2_, mass_term, params_.mode);
    system.rhs = mass_k_ * kx / dt;
    if (explicit_source) {
      system.rhs += assemble_load(
          *p2_, 1, [&](const QuadPoint& qp) { return FieldValue{production(qp), 0.0}; },
          params_.mode, 5);
    }
  }
  const auto constraints = k_constraints();
  apply_dirichlet(system, constraints);
  const Vector x = solve(system, params_.linear);

  KStepResult result{DiscreteField(p2_, 1), 0.0, 0, 0};
  std::copy(x.data(), x.data() + x.size(), result.k.coefficients().begin());
  double min_free = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p2_->n_dofs(); ++i) {
    if (system.constrained_dofs.count(i)) continue;
    ++result.free_dofs;
    double& v = result.k.at(0, i);
    min_free = std::min(min_free, v);
    if (v < tp.k_floor) {
      v = tp.k_floor;
      ++result.floored;
    }
  }
  result.min_before_floor = result.free_dofs > 0 ? min_free : 0.0;
  return result;
}

KStepResult FlowSolver::k_step(const SolverState& state, double dt) const {
  const auto traces = trace_dofs(*p2_, state.u, dt, params_.substeps);
  return k_step(state, dt, traces);
}

double FlowSolver::kinetic_energy(const DiscreteField& u) const {
  const DiscreteField* fields[] = {&u};
  return integrate_functional(
      *mesh_,
      [](const QuadPoint&, std::span<const double> v) { return 0.5 * (v[0] * v[0] + v[1] * v[1]); },
      fields, params_.mode, 5);
}

double FlowSolver::divergence_residual(const DiscreteField& u) const {
  const Eigen::Map<const Vector> x(u.coefficients().data(),
                                   static_cast<Eigen::Index>(u.coefficients().size()));
  const double un = x.norm();
  return un > 0.0 ? (divergence_ * x).norm() / un : 0.0;
}

RunResult run_time_loop(const FlowSolver& solver, const TimeLoopOptions& options) {
  if (!(options.dt > 0.0)) throw ConfigError("dt must be positive");
  if (options.max_steps < 0) throw ConfigError("max_steps must be >= 0");
  RunResult result;
  result.state = solver.initial_state();
  SolverState& state = result.state;
  const double speed_cap = solver.params().blowup_factor * std::max(solver.max_inlet_speed(), 1e-12);

  for (int step = 1; step <= options.max_steps; ++step) {
    const auto traces = trace_dofs(*solver.velocity_space(), state.u, options.dt,
                                   solver.params().substeps);
    KStepResult kr = solver.k_step(state, options.dt, traces);
    VelocityPressure up = solver.ns_step(state, state.k, options.dt, traces);

    if (!up.u.all_finite() || !up.p.all_finite() || !kr.k.all_finite()) {
      throw SolverError("non-finite values at step " + std::to_string(step));
    }
    StepDiagnostics diag;
    diag.step = step;
    diag.min_k_before_floor = kr.min_before_floor;
    diag.floored = kr.floored;
    diag.free_k_dofs = kr.free_dofs;
    for (int i = 0; i < up.u.n_dofs(); ++i) {
      diag.max_speed = std::max(diag.max_speed, std::hypot(up.u.at(0, i), up.u.at(1, i)));
    }
    if (diag.max_speed > speed_cap) {
      throw SolverError("velocity blow-up at step " + std::to_string(step) + ": max |u| = " +
                        std::to_string(diag.max_speed));
    }
    const double r_u = residual_norm(up.u, state.u);
    const double r_k = residual_norm(kr.k, state.k);
    state.u = std::move(up.u);
    state.p = std::move(up.p);
    state.k = std::move(kr.k);
    state.step = step;
    state.time += options.dt;
    state.residual_history.push_back({step, state.time, r_u, r_k});
    diag.kinetic_energy = solver.kinetic_energy(state.u);
    diag.divergence_residual = solver.divergence_residual(state.u);
    result.diagnostics.push_back(diag);
    if (options.on_step) options.on_step(state, diag);
    if (options.stop_at_steady && r_u < options.tol_u && r_k < options.tol_k) {
      result.steady = true;
      break;
    }
  }
  return result;
}

}  // namespace brinkman
