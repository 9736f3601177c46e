#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <map>

#include "brinkman/config.hpp"
#include "brinkman/output.hpp"
#include "brinkman/verification.hpp"

namespace fs = std::filesystem;
using namespace brinkman;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  int steps = -1;
  std::string mode;
  std::string outlet;
};

RunConfig load_config(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : parse_config(o.config);
  if (o.steps >= 0) apply_setting(c, "max_steps", std::to_string(o.steps));
  if (!o.mode.empty()) apply_setting(c, "mode", o.mode);
  if (!o.outlet.empty()) apply_setting(c, "bc.outlet", o.outlet);
  if (!o.out.empty()) apply_setting(c, "output.dir", o.out);
  return c;
}

std::vector<ProfileExtract> profiles(const SolverState& s, const std::vector<double>& zs, int n) {
  std::vector<ProfileExtract> out;
  for (double z : zs) out.push_back(extract_profile(s, z, n));
  return out;
}

std::string diagnostics_csv(const std::vector<StepDiagnostics>& d) {
  std::ostringstream os;
  os.precision(12);
  os << "step,min_k_before_floor,floored,free_k_dofs,kinetic_energy,divergence_residual,max_speed\n";
  for (const auto& x : d) {
    os << x.step << ',' << x.min_k_before_floor << ',' << x.floored << ',' << x.free_k_dofs << ','
       << x.kinetic_energy << ',' << x.divergence_residual << ',' << x.max_speed << '\n';
  }
  return os.str();
}

void write_final(const RunConfig& c, const SolverState& s, const std::string& tag) {
  const fs::path dir = c.output_dir;
  write_vtk(s, dir / (tag + ".vtk"));
  save_state(s, dir / (tag + ".json"));
  write_profiles_csv(profiles(s, c.profile_z, c.profile_samples), dir / "profiles.csv");
}

std::shared_ptr<const Mesh> make_mesh(const RunConfig& c) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(c));
  std::printf("mesh: %d vertices, %d triangles\n", mesh->n_vertices(), mesh->n_triangles());
  return mesh;
}

int cmd_run(const Overrides& o) {
  const RunConfig c = load_config(o);
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  write_text(dir / "config.cfg", serialize_config(c));
  FlowSolver solver(make_mesh(c), c.solver, c.bc);

  TimeLoopOptions options = c.loop_options();
  SolverState last;
  std::vector<StepDiagnostics> diagnostics;
  options.on_step = [&](const SolverState& s, const StepDiagnostics& d) {
    const ResidualRecord& r = s.residual_history.back();
    std::printf("step %4d  t = %8.3f  r_u = %.6e  r_k = %.6e  min k = %.3e  floored = %d\n",
                r.step, r.time, r.r_u, r.r_k, d.min_k_before_floor, d.floored);
    std::fflush(stdout);
    last = s;
    diagnostics.push_back(d);
    write_residual_csv(s.residual_history, dir / "residuals.csv");
    if (c.vtk_every > 0 && d.step % c.vtk_every == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "state_%04d.vtk", d.step);
      write_vtk(s, dir / name);
    }
  };
  try {
    const RunResult result = run_time_loop(solver, options);
    write_residual_csv(result.state.residual_history, dir / "residuals.csv");
    write_text(dir / "diagnostics.csv", diagnostics_csv(result.diagnostics));
    write_final(c, result.state, "final");
    std::printf("%s after %d steps; output in %s\n",
                result.steady ? "steady state reached" : "step limit reached", result.state.step,
                dir.string().c_str());
  } catch (const Error&) {
    write_text(dir / "diagnostics.csv", diagnostics_csv(diagnostics));
    if (last.u.space_ptr()) write_vtk(last, dir / "partial.vtk");
    throw;
  }
  return 0;
}

int cmd_stokes(const Overrides& o) {
  const RunConfig c = load_config(o);
  fs::create_directories(c.output_dir);
  FlowSolver solver(make_mesh(c), c.solver, c.bc);
  const SolverState s = solver.initial_state();
  write_final(c, s, "stokes");
  std::printf("Stokes initial state written to %s\n", c.output_dir.c_str());
  return 0;
}

int cmd_mesh(const Overrides& o, const std::string& path) {
  const RunConfig c = load_config(o);
  const Mesh mesh = build_mesh(c);
  save_mesh(mesh, path);
  std::map<RegionTag, int> counts;
  for (int t = 0; t < mesh.n_triangles(); ++t) ++counts[mesh.region(t)];
  std::printf("%d vertices, %d triangles written to %s\n", mesh.n_vertices(), mesh.n_triangles(),
              path.c_str());
  for (const auto& [region, n] : counts) {
    std::printf("  %-7s %d\n", std::string(to_string(region)).c_str(), n);
  }
  return 0;
}

int cmd_verify(const std::string& which, const std::string& out) {
  std::vector<ConvergenceReport> reports;
  const std::vector<int> levels = {8, 16, 32};
  if (which == "stokes-trig" || which == "all") {
    reports.push_back(convergence_study(stokes_trig_case(), levels));
  }
  if (which == "stokes-poly" || which == "all") {
    reports.push_back(convergence_study(stokes_polynomial_case(), levels));
  }
  if (which == "advection" || which == "all") reports.push_back(advection_study({16, 32, 64}, 1.0));
  if (reports.empty()) throw CLI::ValidationError("--case", "unknown case '" + which + "'");
  std::string csv;
  for (const auto& r : reports) {
    std::cout << format_report_text(r);
    const std::string body = format_report_csv(r);
    csv += csv.empty() ? body : body.substr(body.find('\n') + 1);
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text(out, csv);
  }
  return 0;
}

int cmd_profile(const std::string& state_path, std::vector<double> zs, int samples,
                const std::string& out) {
  const SolverState s = load_state(state_path);
  if (zs.empty()) zs = RunConfig{}.profile_z;
  const std::string csv = format_profiles_csv(profiles(s, zs, samples));
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text(out, csv);
  }
  return 0;
}

void add_common(CLI::App* cmd, Overrides& o, bool with_loop) {
  cmd->add_option("--config", o.config, "configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--mode", o.mode, "planar | axisymmetric")
      ->check(CLI::IsMember({"planar", "axisymmetric"}));
  cmd->add_option("--outlet", o.outlet, "natural | ghost")->check(CLI::IsMember({"natural", "ghost"}));
  if (with_loop) cmd->add_option("--steps", o.steps, "override max_steps")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized RANS solver for axisymmetric flow through trawl nets"};
  app.require_subcommand(1);

  Overrides o;
  auto* run = app.add_subcommand("run", "Stokes initialisation followed by the time loop");
  add_common(run, o, true);
  auto* stokes = app.add_subcommand("stokes", "Stokes initial state only");
  add_common(stokes, o, false);

  std::string mesh_path = "mesh.txt";
  auto* mesh = app.add_subcommand("mesh", "generate the configured mesh and write it");
  mesh->add_option("--config", o.config, "configuration file")->check(CLI::ExistingFile);
  mesh->add_option("--out", mesh_path, "mesh file");

  std::string verify_case = "all";
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "convergence studies");
  verify->add_option("--case", verify_case, "stokes-trig | stokes-poly | advection | all")
      ->check(CLI::IsMember({"stokes-trig", "stokes-poly", "advection", "all"}));
  verify->add_option("--out", verify_out, "CSV report path");

  std::string state_path;
  std::vector<double> zs;
  int samples = 121;
  std::string profile_out;
  auto* profile = app.add_subcommand("profile", "extract u_z profiles from a saved state");
  profile->add_option("--state", state_path, "state .json file")->required()->check(CLI::ExistingFile);
  profile->add_option("--z", zs, "profile heights")->delimiter(',');
  profile->add_option("--samples", samples, "samples per profile")->check(CLI::Range(2, 100000));
  profile->add_option("--out", profile_out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*stokes) return cmd_stokes(o);
    if (*mesh) return cmd_mesh(o, mesh_path);
    if (*verify) return cmd_verify(verify_case, verify_out);
    if (*profile) return cmd_profile(state_path, zs, samples, profile_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
