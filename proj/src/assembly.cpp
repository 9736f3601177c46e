#include "brinkman/assembly.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "brinkman/quadrature.hpp"

namespace brinkman {

namespace {

int kernel_trial_components(Kernel k, int boundary_components) {
  switch (k) {
    case Kernel::Mass:
    case Kernel::Stiffness: return 1;
    case Kernel::SymmetricGradient:
    case Kernel::VectorMass:
    case Kernel::PressureDivergence: return 2;
    case Kernel::BoundaryMass: return boundary_components;
  }
  return 1;
}

int kernel_test_components(Kernel k, int boundary_components) {
  return k == Kernel::PressureDivergence ? 1 : kernel_trial_components(k, boundary_components);
}

void check_spaces(const FunctionSpace& trial, const FunctionSpace& test, const WeakForm& form) {
  if (&trial.mesh() != &test.mesh()) throw Error("trial and test spaces must share the mesh");
  if (form.kernel == Kernel::PressureDivergence) {
    if (trial.degree() != 2 || test.degree() != 1) {
      throw Error("pressure-divergence coupling needs P2 trial and P1 test spaces");
    }
  } else if (trial.degree() != test.degree()) {
    throw Error("kernel requires identical trial and test spaces");
  }
  if (form.kernel == Kernel::BoundaryMass && form.components != 1 && form.components != 2) {
    throw Error("boundary mass needs 1 or 2 components");
  }
}

double eval(const Coefficient& c, const QuadPoint& qp) { return c ? c(qp) : 1.0; }

}  // namespace

SparseMatrix assemble_bilinear(const FunctionSpace& trial, const FunctionSpace& test,
                               const WeakForm& form, IntegrationMode mode) {
  check_spaces(trial, test, form);
  const Mesh& mesh = trial.mesh();
  const int n_trial = trial.n_dofs();
  const int n_test = test.n_dofs();
  const int trial_comps = kernel_trial_components(form.kernel, form.components);
  const int test_comps = kernel_test_components(form.kernel, form.components);
  const bool axi = mode == IntegrationMode::Axisymmetric;
  Triplets triplets;

  if (form.kernel == Kernel::BoundaryMass) {
    const auto& rule = line_quadrature_rule(std::min(form.quadrature_degree, 5));
    const int deg = trial.degree();
    for (const BoundaryEdge& be : mesh.boundary_edges()) {
      if (be.tag != form.boundary) continue;
      const Point a = mesh.vertex(be.a);
      const Point b = mesh.vertex(be.b);
      const Point d = b - a;
      const double len = norm(d);
      const Point normal{d.z / len, -d.r / len};
      const auto dofs = trial.edge_dofs(be);
      for (const auto& q : rule) {
        const double s = q.s;
        // 1D Lagrange basis along the edge: vertex a, vertex b, midpoint.
        std::array<double, 3> phi;
        if (deg == 1) {
          phi = {1.0 - s, s, 0.0};
        } else {
          phi = {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
        }
        QuadPoint qp{be.triangle, {}, a + s * d, normal};
        const double w = q.weight * len * measure_weight(mode, qp.x) * eval(form.coefficient, qp);
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < dofs.size(); ++i) {
          for (std::size_t j = 0; j < dofs.size(); ++j) {
            const double v = w * phi[i] * phi[j];
            for (int c = 0; c < trial_comps; ++c) {
              triplets.emplace_back(c * n_test + dofs[i], c * n_trial + dofs[j], v);
            }
          }
        }
      }
    }
  } else {
    const auto& rule = quadrature_rule(form.quadrature_degree);
    const int ntr = trial.dofs_per_cell();
    const int nte = test.dofs_per_cell();
    triplets.reserve(static_cast<std::size_t>(mesh.n_triangles()) * ntr * nte *
                     trial_comps * test_comps);
    std::vector<double> local(static_cast<std::size_t>(nte * test_comps) * ntr * trial_comps);
    const int cols = ntr * trial_comps;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      std::fill(local.begin(), local.end(), 0.0);
      const auto corners = mesh.corners(t);
      const double area = mesh.area(t);
      for (const auto& q : rule) {
        QuadPoint qp{t, q.bary,
                     q.bary[0] * corners[0] + q.bary[1] * corners[1] + q.bary[2] * corners[2],
                     {}};
        const double w =
            area * q.weight * measure_weight(mode, qp.x) * eval(form.coefficient, qp);
        if (w == 0.0) continue;
        const auto phi_u = shape_values(trial.degree(), q.bary);
        const auto grad_u = shape_gradients(trial.degree(), q.bary, corners);
        const auto phi_v = shape_values(test.degree(), q.bary);
        const auto grad_v = shape_gradients(test.degree(), q.bary, corners);
        const double inv_r = axi ? 1.0 / qp.x.r : 0.0;
        auto add = [&](int i, int ci, int j, int cj, double v) {
          local[static_cast<std::size_t>(ci * nte + i) * cols + cj * ntr + j] += w * v;
        };
        for (int i = 0; i < nte; ++i) {
          for (int j = 0; j < ntr; ++j) {
            switch (form.kernel) {
              case Kernel::Mass:
                add(i, 0, j, 0, phi_v[i] * phi_u[j]);
                break;
              case Kernel::Stiffness:
                add(i, 0, j, 0, dot(grad_v[i], grad_u[j]));
                break;
              case Kernel::VectorMass:
                add(i, 0, j, 0, phi_v[i] * phi_u[j]);
                add(i, 1, j, 1, phi_v[i] * phi_u[j]);
                break;
              case Kernel::SymmetricGradient: {
                // 2 eps(phi_j e_a) : eps(phi_i e_b) = d_ab gu.gv + d_b u d_a v
                const Point gu = grad_u[j];
                const Point gv = grad_v[i];
                const double g = dot(gu, gv);
                add(i, 0, j, 0, g + gu.r * gv.r + (axi ? 2.0 * phi_u[j] * phi_v[i] * inv_r * inv_r : 0.0));
                add(i, 1, j, 1, g + gu.z * gv.z);
                add(i, 1, j, 0, gu.z * gv.r);  // test z, trial r
                add(i, 0, j, 1, gu.r * gv.z);  // test r, trial z
                break;
              }
              case Kernel::PressureDivergence:
                add(i, 0, j, 0, -phi_v[i] * (grad_u[j].r + (axi ? phi_u[j] * inv_r : 0.0)));
                add(i, 0, j, 1, -phi_v[i] * grad_u[j].z);
                break;
              case Kernel::BoundaryMass:
                break;
            }
          }
        }
      }
      const auto dofs_u = trial.cell_dofs(t);
      const auto dofs_v = test.cell_dofs(t);
      for (int ci = 0; ci < test_comps; ++ci) {
        for (int i = 0; i < nte; ++i) {
          for (int cj = 0; cj < trial_comps; ++cj) {
            for (int j = 0; j < ntr; ++j) {
              const double v = local[static_cast<std::size_t>(ci * nte + i) * cols + cj * ntr + j];
              if (v != 0.0) {
                triplets.emplace_back(ci * n_test + dofs_v[i], cj * n_trial + dofs_u[j], v);
              }
            }
          }
        }
      }
    }
  }

  SparseMatrix m(test_comps * n_test, trial_comps * n_trial);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Vector assemble_load(const FunctionSpace& test, int components,
                     const std::function<FieldValue(const QuadPoint&)>& f,
                     IntegrationMode mode, int quadrature_degree) {
  const Mesh& mesh = test.mesh();
  const auto& rule = quadrature_rule(quadrature_degree);
  const int n = test.n_dofs();
  Vector b = Vector::Zero(static_cast<Eigen::Index>(components) * n);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto corners = mesh.corners(t);
    const double area = mesh.area(t);
    const auto dofs = test.cell_dofs(t);
    for (const auto& q : rule) {
      QuadPoint qp{t, q.bary,
                   q.bary[0] * corners[0] + q.bary[1] * corners[1] + q.bary[2] * corners[2],
                   {}};
      const double w = area * q.weight * measure_weight(mode, qp.x);
      const FieldValue v = f(qp);
      const auto phi = shape_values(test.degree(), q.bary);
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        for (int c = 0; c < components; ++c) b[c * n + dofs[i]] += w * v[c] * phi[i];
      }
    }
  }
  return b;
}

Vector assemble_boundary_load(const FunctionSpace& test, int components, BoundaryTag tag,
                              const std::function<FieldValue(const QuadPoint&)>& g,
                              IntegrationMode mode, int quadrature_degree) {
  const Mesh& mesh = test.mesh();
  const auto& rule = line_quadrature_rule(quadrature_degree);
  const int n = test.n_dofs();
  Vector b = Vector::Zero(static_cast<Eigen::Index>(components) * n);
  for (const BoundaryEdge& be : mesh.boundary_edges()) {
    if (be.tag != tag) continue;
    const Point a = mesh.vertex(be.a);
    const Point d = mesh.vertex(be.b) - a;
    const double len = norm(d);
    const Point normal{d.z / len, -d.r / len};
    const auto dofs = test.edge_dofs(be);
    for (const auto& q : rule) {
      const double s = q.s;
      std::array<double, 3> phi;
      if (test.degree() == 1) {
        phi = {1.0 - s, s, 0.0};
      } else {
        phi = {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
      }
      QuadPoint qp{be.triangle, {}, a + s * d, normal};
      const double w = q.weight * len * measure_weight(mode, qp.x);
      const FieldValue v = g(qp);
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        for (int c = 0; c < components; ++c) b[c * n + dofs[i]] += w * v[c] * phi[i];
      }
    }
  }
  return b;
}

void add_block(Triplets& out, const SparseMatrix& block, int row0, int col0, double scale) {
  for (int k = 0; k < block.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(block, k); it; ++it) {
      out.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                       scale * it.value());
    }
  }
}

void apply_dirichlet(SparseSystem& system, std::span<const DirichletValue> constraints) {
  const Eigen::Index n = system.matrix.rows();
  if (system.matrix.cols() != n || system.rhs.size() != n) {
    throw Error("system matrix must be square and match the rhs");
  }
  std::map<int, double> fresh;
  for (const DirichletValue& c : constraints) {
    if (c.dof < 0 || c.dof >= n) throw Error("constraint dof " + std::to_string(c.dof) + " out of range");
    auto check = [&](const std::map<int, double>& m) {
      if (auto it = m.find(c.dof); it != m.end() && it->second != c.value) {
        throw Error("conflicting constraints on dof " + std::to_string(c.dof));
      }
    };
    check(fresh);
    check(system.constrained_dofs);
    fresh[c.dof] = c.value;
  }
  if (fresh.empty()) return;

  std::vector<char> mask(n, 0);
  Vector values = Vector::Zero(n);
  for (const auto& [dof, value] : fresh) {
    mask[dof] = 1;
    values[dof] = value;
  }
  SparseMatrix& a = system.matrix;
  a.makeCompressed();
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      const auto row = it.row();
      if (mask[col] && !mask[row]) system.rhs[row] -= it.value() * values[col];
      if (mask[col] || mask[row]) it.valueRef() = 0.0;
    }
  }
  a.prune(0.0);
  Triplets diag;
  for (const auto& [dof, value] : fresh) {
    diag.emplace_back(dof, dof, 1.0);
    system.rhs[dof] = value;
    system.constrained_dofs[dof] = value;
  }
  SparseMatrix id(n, n);
  id.setFromTriplets(diag.begin(), diag.end());
  a += id;
}

Vector solve(const SparseSystem& system, const LinearSolveContract& contract) {
  const SparseMatrix& a = system.matrix;
  const Vector& b = system.rhs;
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  Vector x;
  if (contract.method == LinearMethod::SparseDirect) {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    SparseMatrix ac = a;
    ac.makeCompressed();
    lu.compute(ac);
    if (lu.info() != Eigen::Success) {
      throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage());
    }
    x = lu.solve(b);
    for (int refine = 0; refine < 3; ++refine) {
      const Vector r = b - a * x;
      if (r.norm() <= contract.tolerance * bnorm) break;
      x += lu.solve(r);
    }
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(contract.tolerance);
    it.setMaxIterations(contract.max_iterations);
    it.preconditioner().setDroptol(1e-6);
    it.preconditioner().setFillfactor(20);
    it.compute(a);
    x = it.solve(b);
  }
  if (!x.allFinite()) throw SolverError("linear solve produced non-finite values");
  const double rel = (b - a * x).norm() / bnorm;
  if (rel > contract.tolerance) {
    throw SolverError("linear solve did not converge: relative residual " + std::to_string(rel) +
                      " > " + std::to_string(contract.tolerance));
  }
  return x;
}

LowOrderScalarForms assemble_low_order(const FunctionSpace& space, const Coefficient& diffusion,
                                       const Coefficient& reaction, const Coefficient& source,
                                       IntegrationMode mode, int quadrature_degree) {
  if (space.degree() != 2) throw Error("low-order forms need a P2 space");
  // Local P2 indices and parent barycentrics of the sub-triangle corners.
  static constexpr std::array<std::array<int, 3>, 4> kSub = {
      {{0, 5, 4}, {1, 3, 5}, {2, 4, 3}, {3, 4, 5}}};
  static constexpr std::array<std::array<double, 3>, 6> kNode = {{{1.0, 0.0, 0.0},
                                                                  {0.0, 1.0, 0.0},
                                                                  {0.0, 0.0, 1.0},
                                                                  {0.0, 0.5, 0.5},
                                                                  {0.5, 0.0, 0.5},
                                                                  {0.5, 0.5, 0.0}}};
  const Mesh& mesh = space.mesh();
  const auto& rule = quadrature_rule(quadrature_degree);
  const int n = space.n_dofs();
  LowOrderScalarForms out{SparseMatrix(n, n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
  Triplets triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 36);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto corners = mesh.corners(t);
    const auto dofs = space.cell_dofs(t);
    for (const auto& sub : kSub) {
      std::array<Point, 3> x;
      for (int a = 0; a < 3; ++a) {
        const auto& l = kNode[sub[a]];
        x[a] = l[0] * corners[0] + l[1] * corners[1] + l[2] * corners[2];
      }
      const double area = 0.5 * cross(x[1] - x[0], x[2] - x[0]);
      const auto grad = barycentric_gradients(x);
      double weighted_diffusion = 0.0;
      for (const auto& q : rule) {
        QuadPoint qp;
        qp.triangle = t;
        for (int a = 0; a < 3; ++a) {
          for (int c = 0; c < 3; ++c) qp.bary[c] += q.bary[a] * kNode[sub[a]][c];
        }
        qp.x = q.bary[0] * x[0] + q.bary[1] * x[1] + q.bary[2] * x[2];
        const double w = area * q.weight * measure_weight(mode, qp.x);
        weighted_diffusion += w * eval(diffusion, qp);
        const double c = reaction ? reaction(qp) : 0.0;
        const double f = source ? source(qp) : 0.0;
        for (int a = 0; a < 3; ++a) {
          const int i = dofs[sub[a]];
          out.mass[i] += w * q.bary[a];
          out.reaction[i] += w * c * q.bary[a];
          out.source[i] += w * f * q.bary[a];
        }
      }
      std::array<std::array<double, 3>, 3> local{};
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) local[a][b] = weighted_diffusion * dot(grad[a], grad[b]);
      }
      for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
          const double d = local[a][b];
          if (d <= 0.0) continue;
          local[a][b] -= d;
          local[b][a] -= d;
          local[a][a] += d;
          local[b][b] += d;
        }
      }
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (local[a][b] != 0.0) triplets.emplace_back(dofs[sub[a]], dofs[sub[b]], local[a][b]);
        }
      }
    }
  }
  out.diffusion.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace brinkman
