#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "brinkman/fem.hpp"

namespace brinkman {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Scalar coefficient evaluated at a quadrature point. Empty means 1.
using Coefficient = std::function<double(const QuadPoint&)>;

enum class Kernel {
  Mass,                // scalar: c u v
  Stiffness,           // scalar: c grad u . grad v
  SymmetricGradient,   // vector: c/2 (grad u + grad u^T) : (grad v + grad v^T)
  PressureDivergence,  // vector trial, scalar test: -q div u
  VectorMass,          // vector: c u . v (penalization)
  BoundaryMass,        // scalar or vector, on edges with `boundary`
};

struct WeakForm {
  Kernel kernel = Kernel::Mass;
  Coefficient coefficient;
  BoundaryTag boundary = BoundaryTag::Outlet;  // BoundaryMass only
  int components = 1;                          // BoundaryMass only
  int quadrature_degree = 5;
};

/// Assembles the form into a (test dofs x components) by (trial dofs x
/// components) matrix. Vector unknowns are component-blocked, matching
/// DiscreteField. In axisymmetric mode the symmetric gradient carries the
/// hoop strain u_r / r and the divergence the term u_r / r.
SparseMatrix assemble_bilinear(const FunctionSpace& trial, const FunctionSpace& test,
                               const WeakForm& form, IntegrationMode mode);

/// Volume load vector  int f . v  (component-blocked).
Vector assemble_load(const FunctionSpace& test, int components,
                     const std::function<FieldValue(const QuadPoint&)>& f,
                     IntegrationMode mode, int quadrature_degree = 6);

/// Boundary load vector  int_{tag} g . v  where g may use the outward normal
/// stored in QuadPoint::normal.
Vector assemble_boundary_load(const FunctionSpace& test, int components, BoundaryTag tag,
                              const std::function<FieldValue(const QuadPoint&)>& g,
                              IntegrationMode mode, int quadrature_degree = 5);

/// Adds `block * scale` into `out` at offset (row0, col0).
void add_block(Triplets& out, const SparseMatrix& block, int row0, int col0,
               double scale = 1.0);

/// Low-order scalar operator on P2 dofs: every triangle is split into four
/// P1 sub-triangles through its edge midpoints, mass, reaction and source
/// are lumped against the sub-triangle hat functions, and positive
/// off-diagonal diffusion entries are removed by element-level artificial
/// diffusion. With nonnegative data the resulting system is an M-matrix.
struct LowOrderScalarForms {
  SparseMatrix diffusion;
  Vector mass;      // int psi_i
  Vector reaction;  // int c psi_i
  Vector source;    // int f psi_i
};

LowOrderScalarForms assemble_low_order(const FunctionSpace& space, const Coefficient& diffusion,
                                       const Coefficient& reaction, const Coefficient& source,
                                       IntegrationMode mode, int quadrature_degree = 5);

struct DirichletValue {
  int dof = 0;
  double value = 0.0;
};

struct SparseSystem {
  SparseMatrix matrix;
  Vector rhs;
  std::map<int, double> constrained_dofs;
};

/// Symmetric elimination: known values move to the rhs, constrained rows
/// and columns become identity with rhs = value. Conflicting duplicates
/// throw.
void apply_dirichlet(SparseSystem& system, std::span<const DirichletValue> constraints);

enum class LinearMethod { SparseDirect, Iterative };

struct LinearSolveContract {
  LinearMethod method = LinearMethod::SparseDirect;
  double tolerance = 1e-9;  // relative residual |Ax - b| / |b|
  int max_iterations = 5000;
};

/// Solves the system or throws SolverError when the contract is not met.
Vector solve(const SparseSystem& system, const LinearSolveContract& contract);

}  // namespace brinkman
