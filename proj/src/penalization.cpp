#include "brinkman/penalization.hpp"

#include <cmath>

namespace brinkman {

std::vector<double> coefficient_field(const Mesh& mesh, const PermeabilityTable& table) {
  std::map<RegionTag, double> inverse;
  for (const auto& [region, k] : table.K) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw ConfigError("permeability of region " + std::string(to_string(region)) +
                        " must be positive");
    }
    inverse[region] = 1.0 / k;
  }
  std::vector<double> c(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto it = inverse.find(mesh.region(t));
    if (it == inverse.end()) {
      throw ConfigError("no permeability given for region " +
                        std::string(to_string(mesh.region(t))));
    }
    c[t] = it->second;
  }
  return c;
}

SparseMatrix assemble_penalty(const FunctionSpace& space, const std::vector<double>& coefficient,
                              IntegrationMode mode) {
  if (static_cast<int>(coefficient.size()) != space.mesh().n_triangles()) {
    throw Error("penalty coefficient needs one value per triangle");
  }
  WeakForm form;
  form.kernel = Kernel::VectorMass;
  form.coefficient = [&coefficient](const QuadPoint& qp) { return coefficient[qp.triangle]; };
  return assemble_bilinear(space, space, form, mode);
}

}  // namespace brinkman
