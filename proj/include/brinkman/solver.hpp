#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "brinkman/assembly.hpp"
#include "brinkman/characteristics.hpp"
#include "brinkman/penalization.hpp"
#include "brinkman/turbulence.hpp"

namespace brinkman {

enum class InletProfile { Uniform, Poiseuille };
enum class LateralCondition { Slip, NoSlip };
enum class OutletCondition { Natural, Ghost };
enum class KOutletCondition { ZeroFlux, ZeroValue };

struct BoundaryConfig {
  InletProfile inlet = InletProfile::Uniform;
  double U0 = 0.51;    // uniform inlet speed, m/s
  double D = 0.0;      // Poiseuille u_I(r) = D r (alpha - r)
  double alpha = 0.0;  // Poiseuille width; <= 0 uses r_max
  LateralCondition lateral = LateralCondition::Slip;
  OutletCondition outlet = OutletCondition::Natural;
  double k_inlet = 0.0;
  double k_lateral = 0.01;
  KOutletCondition k_outlet = KOutletCondition::ZeroFlux;

  /// Axial inflow speed at radius r. The ghost outlet reuses the same
  /// profile at the outlet.
  double inlet_speed(double r, double r_max) const;
  void validate() const;
};

/// How the production term k^{m+1}/k^m of the TKE scheme is discretized.
enum class ProductionForm {
  ImplicitRatio,  // -P k^{m+1}/k^m on the left-hand side
  Explicit,       // +P on the right-hand side (ratio taken as 1)
};

/// Spatial discretization of the TKE equation on the P2 dofs.
enum class KScheme {
  Galerkin,  // consistent P2 Galerkin
  LowOrder,  // lumped P1 sub-triangle operator, nonnegative for nonnegative data
};

struct SolverParams {
  IntegrationMode mode = IntegrationMode::Axisymmetric;
  TurbulenceParams turbulence;
  PermeabilityTable permeability;
  double k_initial = 0.01;
  double pressure_penalty = 1e-7;
  int substeps = 4;
  bool limiter = true;
  ProductionForm production = ProductionForm::Explicit;
  KScheme k_scheme = KScheme::LowOrder;
  LinearSolveContract linear;
  double blowup_factor = 100.0;
};

struct ResidualRecord {
  int step = 0;
  double time = 0.0;
  double r_u = 0.0;
  double r_k = 0.0;
};

/// u: P2 vector (m/s), p: P1 kinematic pressure (m^2/s^2), k: P2 TKE.
struct SolverState {
  DiscreteField u;
  DiscreteField p;
  DiscreteField k;
  double time = 0.0;
  int step = 0;
  std::vector<ResidualRecord> residual_history;
};

struct KStepResult {
  DiscreteField k;
  double min_before_floor = 0.0;  // over unconstrained dofs
  int floored = 0;                // unconstrained dofs raised to k_floor
  int free_dofs = 0;
};

struct VelocityPressure {
  DiscreteField u;
  DiscreteField p;
};

struct GhostContribution {
  SparseMatrix matrix;  // 2 n_u x 2 n_u
  Vector rhs;           // 2 n_u
};

struct StepDiagnostics {
  int step = 0;
  double min_k_before_floor = 0.0;
  int floored = 0;
  int free_k_dofs = 0;
  double kinetic_energy = 0.0;
  double divergence_residual = 0.0;
  double max_speed = 0.0;
};

/// Penalized RANS / Brinkman solver on a fixed mesh: P2/P1 velocity and
/// pressure, P2 TKE, characteristic-Galerkin convection.
class FlowSolver {
 public:
  FlowSolver(std::shared_ptr<const Mesh> mesh, SolverParams params, BoundaryConfig bc);

  const Mesh& mesh() const { return *mesh_; }
  const SolverParams& params() const { return params_; }
  const BoundaryConfig& boundary() const { return bc_; }
  const SpacePtr& velocity_space() const { return p2_; }
  const SpacePtr& pressure_space() const { return p1_; }
  const std::vector<double>& mixing_length() const { return ell_; }
  const std::vector<double>& penalty_coefficient() const { return penalty_; }

  /// Steady Stokes/Brinkman problem with viscosity nu0; the state also
  /// carries k = k_initial everywhere.
  SolverState initial_state() const;
  VelocityPressure solve_stokes() const;

  /// One implicit momentum step. `k_visc` sets nu0 + C1 l sqrt(k);
  /// `traces` are the characteristic feet of the P2 dofs under state.u.
  VelocityPressure ns_step(const SolverState& state, const DiscreteField& k_visc, double dt,
                           const std::vector<TracePoint>& traces) const;
  VelocityPressure ns_step(const SolverState& state, double dt) const;

  /// One semi-implicit TKE step with convection and production from state.u.
  KStepResult k_step(const SolverState& state, double dt,
                     const std::vector<TracePoint>& traces) const;
  KStepResult k_step(const SolverState& state, double dt) const;

  /// Outlet terms of the ghost condition with (u.n)^- frozen at u_prev:
  /// matrix  1/2 (u.n)^- u.v, rhs  (1/2 (u.n)^- + u.n) u_I . v.
  GhostContribution assemble_ghost_outlet(const DiscreteField& u_prev) const;
  /// Same, with an explicit outlet datum u_I(x) instead of the inlet profile.
  GhostContribution assemble_ghost_outlet(const DiscreteField& u_prev,
                                          const std::function<FieldValue(const Point&)>& u_in) const;

  std::vector<DirichletValue> velocity_constraints() const;
  std::vector<DirichletValue> k_constraints() const;

  double kinetic_energy(const DiscreteField& u) const;
  /// |B u| / |u| with B the weak divergence matrix.
  double divergence_residual(const DiscreteField& u) const;
  double max_inlet_speed() const;

 private:
  SparseSystem build_momentum_system(const SparseMatrix& a, const Vector& momentum_rhs) const;
  VelocityPressure split(const Vector& x) const;

  std::shared_ptr<const Mesh> mesh_;
  SolverParams params_;
  BoundaryConfig bc_;
  SpacePtr p2_;
  SpacePtr p1_;
  std::vector<double> ell_;
  std::vector<double> penalty_;
  SparseMatrix mass_u_;      // vector P2 mass
  SparseMatrix mass_k_;      // scalar P2 mass
  SparseMatrix penalty_u_;   // penalty vector mass
  SparseMatrix divergence_;  // P1 x (2 P2)
  SparseMatrix mass_p_;      // P1 mass
};

/// Euclidean norm of the coefficient difference.
double residual_norm(const DiscreteField& f_new, const DiscreteField& f_old);

struct TimeLoopOptions {
  double dt = 0.667;
  int max_steps = 80;
  double tol_u = 5e-3;
  double tol_k = 2e-3;
  bool stop_at_steady = true;
  std::function<void(const SolverState&, const StepDiagnostics&)> on_step;
};

struct RunResult {
  SolverState state;
  std::vector<StepDiagnostics> diagnostics;
  bool steady = false;
};

/// Stokes initialisation, then per step: TKE solve, then momentum solve,
/// until max_steps or both residuals fall below the thresholds.
RunResult run_time_loop(const FlowSolver& solver, const TimeLoopOptions& options);

}  // namespace brinkman
