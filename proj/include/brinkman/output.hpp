#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "brinkman/solver.hpp"

namespace brinkman {

/// Legacy ASCII VTK unstructured grid: vertex data u (r, z, theta = 0), p,
/// k and the cell region tag.
std::string format_vtk(const SolverState& state);
void write_vtk(const SolverState& state, const std::filesystem::path& path);

struct ProfileSample {
  double r = 0.0;
  bool present = false;  // false when the point is outside the mesh
  double u_r = 0.0;
  double u_z = 0.0;
  double k = 0.0;
  double p = 0.0;
};

struct ProfileExtract {
  double z = 0.0;
  std::vector<ProfileSample> samples;  // ordered in r
};

/// n_samples points spread uniformly over [r_min, r_max] at height z.
ProfileExtract extract_profile(const SolverState& state, double z, int n_samples);

/// Columns z, r, u_r, u_z, k, p; absent samples are skipped.
std::string format_profiles_csv(const std::vector<ProfileExtract>& profiles);
void write_profiles_csv(const std::vector<ProfileExtract>& profiles,
                        const std::filesystem::path& path);

/// Columns step, time, r_u, r_k.
std::string format_residual_csv(const std::vector<ResidualRecord>& history);
void write_residual_csv(const std::vector<ResidualRecord>& history,
                        const std::filesystem::path& path);

/// Final-state save: `<stem>.json` with the coefficients and `<stem>.mesh`
/// with the mesh in the native text format.
void save_state(const SolverState& state, const std::filesystem::path& json_path);
SolverState load_state(const std::filesystem::path& json_path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace brinkman
