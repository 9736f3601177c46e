#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "brinkman/geometry.hpp"
#include "brinkman/solver.hpp"

namespace brinkman {

struct GeometryConfig {
  std::string source = "bundled";  // "bundled" or a mesh file path
  double r_max = 0.6;
  double z_max = 2.0;
  double h = 0.04;
  double h_fine = 0.017;
  double refine_margin = 0.1;
  double grading = 0.3;
  double min_angle = 15.0;
};

struct RunConfig {
  GeometryConfig geometry;
  SolverParams solver;
  BoundaryConfig bc;
  double dt = 0.667;
  int max_steps = 80;
  double tol_u = 5e-3;
  double tol_k = 2e-3;
  std::string output_dir = "output";
  int vtk_every = 0;  // 0: final state only
  std::vector<double> profile_z = {0.2, 0.35, 0.5, 0.65, 0.8, 1.1, 1.4};
  int profile_samples = 121;

  GeometryParams geometry_params() const;
  TimeLoopOptions loop_options() const;
  /// Cross-field checks (profile stations inside the box, ...).
  void validate() const;
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys and bad
/// values throw ConfigError naming the key.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Sets one key as if it appeared in a config file, then revalidates.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Every key with its current value, parseable by parse_config_text.
std::string serialize_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

/// Builds the mesh described by the geometry section.
Mesh build_mesh(const RunConfig& config);

}  // namespace brinkman
