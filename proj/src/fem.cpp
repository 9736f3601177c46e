#include "brinkman/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brinkman/quadrature.hpp"

namespace brinkman {

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (!mesh_) throw Error("function space needs a mesh");
  if (degree_ != 1 && degree_ != 2) {
    throw Error("unsupported element degree " + std::to_string(degree_));
  }
  const Mesh& m = *mesh_;
  const int nv = m.n_vertices();
  n_dofs_ = degree_ == 1 ? nv : nv + m.n_edges();
  dof_points_ = m.vertices();
  if (degree_ == 2) {
    for (int e = 0; e < m.n_edges(); ++e) {
      const auto& ed = m.edge(e);
      dof_points_.push_back(0.5 * (m.vertex(ed[0]) + m.vertex(ed[1])));
    }
  }
  const int per = dofs_per_cell();
  cell_dofs_.resize(static_cast<std::size_t>(m.n_triangles()) * per);
  dof_cells_.assign(n_dofs_, std::numeric_limits<int>::max());
  for (int t = 0; t < m.n_triangles(); ++t) {
    int* d = cell_dofs_.data() + static_cast<std::size_t>(t) * per;
    const auto& tri = m.triangle(t);
    for (int i = 0; i < 3; ++i) d[i] = tri[i];
    if (degree_ == 2) {
      const auto& te = m.triangle_edges(t);
      for (int i = 0; i < 3; ++i) d[3 + i] = nv + te[i];
    }
    for (int i = 0; i < per; ++i) dof_cells_[d[i]] = std::min(dof_cells_[d[i]], t);
  }
}

std::vector<int> FunctionSpace::edge_dofs(const BoundaryEdge& edge) const {
  std::vector<int> dofs = {edge.a, edge.b};
  if (degree_ == 2) dofs.push_back(mesh_->n_vertices() + edge.edge);
  return dofs;
}

std::vector<int> FunctionSpace::boundary_dofs(BoundaryTag tag) const {
  std::vector<int> dofs;
  for (const BoundaryEdge& be : mesh_->boundary_edges()) {
    if (be.tag != tag) continue;
    for (int d : edge_dofs(be)) dofs.push_back(d);
  }
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

std::array<double, 6> shape_values(int degree, const std::array<double, 3>& l) {
  if (degree == 1) return {l[0], l[1], l[2], 0.0, 0.0, 0.0};
  return {l[0] * (2.0 * l[0] - 1.0),
          l[1] * (2.0 * l[1] - 1.0),
          l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[1] * l[2],
          4.0 * l[2] * l[0],
          4.0 * l[0] * l[1]};
}

std::array<Point, 3> barycentric_gradients(const std::array<Point, 3>& c) {
  const double a2 = cross(c[1] - c[0], c[2] - c[0]);
  // grad lambda_i is the inward normal of the opposite edge over 2 * area.
  std::array<Point, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point e = c[(i + 2) % 3] - c[(i + 1) % 3];
    g[i] = Point{-e.z / a2, e.r / a2};
  }
  return g;
}

std::array<Point, 6> shape_gradients(int degree, const std::array<double, 3>& l,
                                     const std::array<Point, 3>& corners) {
  const auto g = barycentric_gradients(corners);
  if (degree == 1) return {g[0], g[1], g[2], Point{}, Point{}, Point{}};
  return {(4.0 * l[0] - 1.0) * g[0],
          (4.0 * l[1] - 1.0) * g[1],
          (4.0 * l[2] - 1.0) * g[2],
          4.0 * (l[1] * g[2] + l[2] * g[1]),
          4.0 * (l[2] * g[0] + l[0] * g[2]),
          4.0 * (l[0] * g[1] + l[1] * g[0])};
}

DiscreteField::DiscreteField(SpacePtr space, int components)
    : space_(std::move(space)), components_(components) {
  if (components_ != 1 && components_ != 2) throw Error("fields have 1 or 2 components");
  coefficients_.assign(static_cast<std::size_t>(components_) * space_->n_dofs(), 0.0);
}

DiscreteField::DiscreteField(SpacePtr space, int components,
                             std::vector<double> coefficients)
    : DiscreteField(std::move(space), components) {
  if (coefficients.size() != coefficients_.size()) {
    throw Error("coefficient array length does not match the space");
  }
  coefficients_ = std::move(coefficients);
}

DiscreteField DiscreteField::interpolate(SpacePtr space, int components,
                                         const std::function<FieldValue(const Point&)>& f) {
  DiscreteField field(std::move(space), components);
  const int n = field.n_dofs();
  for (int i = 0; i < n; ++i) {
    const FieldValue v = f(field.space().dof_point(i));
    for (int c = 0; c < components; ++c) field.at(c, i) = v[c];
  }
  return field;
}

FieldValue DiscreteField::value_in_cell(int t, const std::array<double, 3>& bary) const {
  const auto phi = shape_values(space_->degree(), bary);
  const auto dofs = space_->cell_dofs(t);
  FieldValue v{0.0, 0.0};
  for (int c = 0; c < components_; ++c) {
    for (std::size_t i = 0; i < dofs.size(); ++i) v[c] += phi[i] * at(c, dofs[i]);
  }
  return v;
}

Point DiscreteField::gradient_in_cell(int component, int t,
                                      const std::array<double, 3>& bary) const {
  const auto grad = shape_gradients(space_->degree(), bary, space_->mesh().corners(t));
  const auto dofs = space_->cell_dofs(t);
  Point g;
  for (std::size_t i = 0; i < dofs.size(); ++i) g = g + at(component, dofs[i]) * grad[i];
  return g;
}

std::pair<double, double> DiscreteField::cell_range(int component, int t) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int d : space_->cell_dofs(t)) {
    lo = std::min(lo, at(component, d));
    hi = std::max(hi, at(component, d));
  }
  return {lo, hi};
}

bool DiscreteField::all_finite() const {
  return std::all_of(coefficients_.begin(), coefficients_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::optional<FieldValue> evaluate_field(const DiscreteField& field, const Point& x,
                                         std::optional<int> hint) {
  const LocateResult loc = field.space().mesh().locate(x, hint);
  if (!loc.found()) return std::nullopt;
  return field.value_in_cell(loc.location->triangle, loc.location->bary);
}

double integrate_functional(const Mesh& mesh, const PointIntegrand& integrand,
                            std::span<const DiscreteField* const> fields,
                            IntegrationMode mode, int quadrature_degree) {
  for (const DiscreteField* f : fields) {
    if (&f->space().mesh() != &mesh) throw Error("fields must share the mesh");
  }
  const auto& rule = quadrature_rule(quadrature_degree);
  std::vector<double> values;
  double total = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const double area = mesh.area(t);
    double local = 0.0;
    for (const auto& q : rule) {
      QuadPoint qp{t, q.bary,
                   q.bary[0] * c[0] + q.bary[1] * c[1] + q.bary[2] * c[2], Point{}};
      values.clear();
      for (const DiscreteField* f : fields) {
        const FieldValue v = f->value_in_cell(t, q.bary);
        for (int k = 0; k < f->components(); ++k) values.push_back(v[k]);
      }
      local += q.weight * measure_weight(mode, qp.x) * integrand(qp, values);
    }
    total += area * local;
  }
  return total;
}

double l2_error(const DiscreteField& field,
                const std::function<FieldValue(const Point&)>& exact,
                IntegrationMode mode, int quadrature_degree) {
  const DiscreteField* fields[] = {&field};
  const int nc = field.components();
  const double sq = integrate_functional(
      field.space().mesh(),
      [&](const QuadPoint& qp, std::span<const double> v) {
        const FieldValue e = exact(qp.x);
        double s = 0.0;
        for (int c = 0; c < nc; ++c) s += (v[c] - e[c]) * (v[c] - e[c]);
        return s;
      },
      fields, mode, quadrature_degree);
  return std::sqrt(sq);
}

}  // namespace brinkman
