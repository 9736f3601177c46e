#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "brinkman/mesh.hpp"

namespace brinkman {

/// Continuous Lagrange space of degree 1 or 2. P2 dofs are numbered
/// vertices first, then edge midpoints in mesh edge order.
class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int n_dofs() const { return n_dofs_; }
  int dofs_per_cell() const { return degree_ == 1 ? 3 : 6; }

  /// Local order: the three vertices, then the midpoints of local edges
  /// 0, 1, 2 (edge i is opposite vertex i).
  std::span<const int> cell_dofs(int t) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(t) * dofs_per_cell(),
            static_cast<std::size_t>(dofs_per_cell())};
  }
  const Point& dof_point(int dof) const { return dof_points_[dof]; }
  const std::vector<Point>& dof_points() const { return dof_points_; }
  /// One triangle containing the dof (lowest index).
  int dof_cell(int dof) const { return dof_cells_[dof]; }

  /// Dofs lying on edges carrying `tag`, sorted and unique.
  std::vector<int> boundary_dofs(BoundaryTag tag) const;
  /// Dofs of a single boundary edge: its two vertices, then the midpoint
  /// for P2.
  std::vector<int> edge_dofs(const BoundaryEdge& edge) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int n_dofs_;
  std::vector<int> cell_dofs_;
  std::vector<Point> dof_points_;
  std::vector<int> dof_cells_;
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

/// Reference shape functions in barycentric coordinates.
std::array<double, 6> shape_values(int degree, const std::array<double, 3>& bary);
/// Physical gradients given the triangle's corners.
std::array<Point, 6> shape_gradients(int degree, const std::array<double, 3>& bary,
                                     const std::array<Point, 3>& corners);
/// Gradients of the barycentric coordinates on a triangle.
std::array<Point, 3> barycentric_gradients(const std::array<Point, 3>& corners);

using FieldValue = std::array<double, 2>;

/// Scalar or 2-vector field. Coefficients are stored component-blocked:
/// component c of dof i lives at c * n_dofs + i.
class DiscreteField {
 public:
  DiscreteField() = default;
  DiscreteField(SpacePtr space, int components);
  DiscreteField(SpacePtr space, int components, std::vector<double> coefficients);

  static DiscreteField interpolate(SpacePtr space, int components,
                                   const std::function<FieldValue(const Point&)>& f);

  const FunctionSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int components() const { return components_; }
  int n_dofs() const { return space_->n_dofs(); }

  std::vector<double>& coefficients() { return coefficients_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double& at(int component, int dof) { return coefficients_[component * n_dofs() + dof]; }
  double at(int component, int dof) const { return coefficients_[component * n_dofs() + dof]; }

  FieldValue value_in_cell(int t, const std::array<double, 3>& bary) const;
  /// Gradient of one component inside a triangle.
  Point gradient_in_cell(int component, int t, const std::array<double, 3>& bary) const;
  /// Min/max of the nodal coefficients of one component on a triangle.
  std::pair<double, double> cell_range(int component, int t) const;

  bool all_finite() const;

 private:
  SpacePtr space_;
  int components_ = 1;
  std::vector<double> coefficients_;
};

/// Interpolated value at x, or nullopt when x is outside the mesh.
std::optional<FieldValue> evaluate_field(const DiscreteField& field, const Point& x,
                                         std::optional<int> hint = {});

/// Context passed to coefficient functions at each quadrature point.
struct QuadPoint {
  int triangle = -1;
  std::array<double, 3> bary{};
  Point x;
  Point normal;  // outward unit normal on boundary points, zero otherwise
};

using PointIntegrand = std::function<double(const QuadPoint&, std::span<const double>)>;

/// Integral of `integrand(point, values)` over the mesh, where `values`
/// concatenates the components of `fields` at the point. Axisymmetric mode
/// multiplies by |r| * pi.
double integrate_functional(const Mesh& mesh, const PointIntegrand& integrand,
                            std::span<const DiscreteField* const> fields,
                            IntegrationMode mode, int quadrature_degree = 5);

/// L2 norm of (field - exact) over the mesh, planar or weighted.
double l2_error(const DiscreteField& field,
                const std::function<FieldValue(const Point&)>& exact,
                IntegrationMode mode, int quadrature_degree = 6);

}  // namespace brinkman
