#include "brinkman/output.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace brinkman {

namespace {

const Mesh& state_mesh(const SolverState& state) {
  if (!state.u.space_ptr()) throw Error("state has no velocity field");
  return state.u.space().mesh();
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string format_vtk(const SolverState& state) {
  const Mesh& mesh = state_mesh(state);
  const int nv = mesh.n_vertices();
  const int nt = mesh.n_triangles();
  std::ostringstream os;
  os.precision(12);
  os << "# vtk DataFile Version 3.0\n";
  os << "brinkman-rans t=" << state.time << " step=" << state.step << "\n";
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nv << " double\n";
  for (const Point& v : mesh.vertices()) os << v.r << ' ' << v.z << " 0\n";
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& tri : mesh.triangles()) os << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) os << "5\n";
  os << "CELL_DATA " << nt << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t) os << static_cast<int>(mesh.region(t)) << '\n';
  // P2 and P1 dofs both start with the mesh vertices.
  os << "POINT_DATA " << nv << "\nVECTORS u double\n";
  for (int v = 0; v < nv; ++v) os << state.u.at(0, v) << ' ' << state.u.at(1, v) << " 0\n";
  os << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < nv; ++v) os << (state.p.space_ptr() ? state.p.at(0, v) : 0.0) << '\n';
  os << "SCALARS k double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < nv; ++v) os << (state.k.space_ptr() ? state.k.at(0, v) : 0.0) << '\n';
  return os.str();
}

void write_vtk(const SolverState& state, const std::filesystem::path& path) {
  write_text(path, format_vtk(state));
}

ProfileExtract extract_profile(const SolverState& state, double z, int n_samples) {
  const Mesh& mesh = state_mesh(state);
  const Point lo = mesh.min_corner();
  const Point hi = mesh.max_corner();
  if (z < lo.z || z > hi.z) {
    throw Error("profile height " + std::to_string(z) + " lies outside [" +
                std::to_string(lo.z) + ", " + std::to_string(hi.z) + "]");
  }
  if (n_samples < 2) throw Error("a profile needs at least two samples");
  ProfileExtract out;
  out.z = z;
  std::optional<int> hint;
  for (int i = 0; i < n_samples; ++i) {
    ProfileSample s;
    s.r = i + 1 == n_samples ? hi.r : lo.r + (hi.r - lo.r) * i / (n_samples - 1);
    const Point x{s.r, z};
    const LocateResult loc = mesh.locate(x, hint);
    if (loc.found()) {
      const int t = loc.location->triangle;
      hint = t;
      const auto& l = loc.location->bary;
      const FieldValue u = state.u.value_in_cell(t, l);
      s.present = true;
      s.u_r = u[0];
      s.u_z = u[1];
      s.k = state.k.space_ptr() ? state.k.value_in_cell(t, l)[0] : 0.0;
      s.p = state.p.space_ptr() ? state.p.value_in_cell(t, l)[0] : 0.0;
    }
    out.samples.push_back(s);
  }
  return out;
}

std::string format_profiles_csv(const std::vector<ProfileExtract>& profiles) {
  std::ostringstream os;
  os.precision(12);
  os << "z,r,u_r,u_z,k,p\n";
  for (const ProfileExtract& p : profiles) {
    for (const ProfileSample& s : p.samples) {
      if (!s.present) continue;
      os << p.z << ',' << s.r << ',' << s.u_r << ',' << s.u_z << ',' << s.k << ',' << s.p << '\n';
    }
  }
  return os.str();
}

void write_profiles_csv(const std::vector<ProfileExtract>& profiles,
                        const std::filesystem::path& path) {
  write_text(path, format_profiles_csv(profiles));
}

std::string format_residual_csv(const std::vector<ResidualRecord>& history) {
  std::ostringstream os;
  os.precision(12);
  os << "step,time,r_u,r_k\n";
  for (const ResidualRecord& r : history) {
    os << r.step << ',' << r.time << ',' << r.r_u << ',' << r.r_k << '\n';
  }
  return os.str();
}

void write_residual_csv(const std::vector<ResidualRecord>& history,
                        const std::filesystem::path& path) {
  write_text(path, format_residual_csv(history));
}

void save_state(const SolverState& state, const std::filesystem::path& json_path) {
  const Mesh& mesh = state_mesh(state);
  std::filesystem::path mesh_path = json_path;
  mesh_path.replace_extension(".mesh");
  save_mesh(mesh, mesh_path);
  nlohmann::json j;
  j["mesh"] = mesh_path.filename().string();
  j["time"] = state.time;
  j["step"] = state.step;
  j["u"] = state.u.coefficients();
  j["p"] = state.p.coefficients();
  j["k"] = state.k.coefficients();
  nlohmann::json history = nlohmann::json::array();
  for (const ResidualRecord& r : state.residual_history) {
    history.push_back({{"step", r.step}, {"time", r.time}, {"r_u", r.r_u}, {"r_k", r.r_k}});
  }
  j["residual_history"] = history;
  write_text(json_path, j.dump() + "\n");
}

SolverState load_state(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error("cannot open state file " + json_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(json_path.string() + ": " + e.what());
  }
  try {
    const auto mesh = std::make_shared<const Mesh>(
        load_mesh(json_path.parent_path() / j.at("mesh").get<std::string>()));
    auto p2 = std::make_shared<const FunctionSpace>(mesh, 2);
    auto p1 = std::make_shared<const FunctionSpace>(mesh, 1);
    auto u = j.at("u").get<std::vector<double>>();
    auto p = j.at("p").get<std::vector<double>>();
    auto k = j.at("k").get<std::vector<double>>();
    if (u.size() != 2u * p2->n_dofs() || p.size() != static_cast<std::size_t>(p1->n_dofs()) ||
        k.size() != static_cast<std::size_t>(p2->n_dofs())) {
      throw Error(json_path.string() + ": field sizes do not match the mesh");
    }
    SolverState s;
    s.u = DiscreteField(p2, 2, std::move(u));
    s.p = DiscreteField(p1, 1, std::move(p));
    s.k = DiscreteField(p2, 1, std::move(k));
    s.time = j.at("time").get<double>();
    s.step = j.at("step").get<int>();
    for (const auto& r : j.at("residual_history")) {
      s.residual_history.push_back({r.at("step").get<int>(), r.at("time").get<double>(),
                                    r.at("r_u").get<double>(), r.at("r_k").get<double>()});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(json_path.string() + ": " + e.what());
  }
}

}  // namespace brinkman
