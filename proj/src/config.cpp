#include "brinkman/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace brinkman {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_real(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a real number, got '" + value + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return v;
}

enum class Bound { Any, Positive, NonNegative };

void check_bound(const std::string& key, double v, Bound bound) {
  if (bound == Bound::Positive && !(v > 0.0)) {
    throw ConfigError(key + ": expected a value > 0, got " + format_real(v));
  }
  if (bound == Bound::NonNegative && !(v >= 0.0)) {
    throw ConfigError(key + ": expected a value >= 0, got " + format_real(v));
  }
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Access>
Field real_field(const std::string& key, Access access, Bound bound) {
  return {[=](RunConfig& c, const std::string& v) {
            const double x = parse_real(key, v);
            check_bound(key, x, bound);
            access(c) = x;
          },
          [=](const RunConfig& c) { return format_real(access(const_cast<RunConfig&>(c))); }};
}

template <typename Access>
Field int_field(const std::string& key, Access access, int min) {
  return {[=](RunConfig& c, const std::string& v) {
            const int x = parse_int(key, v);
            if (x < min) {
              throw ConfigError(key + ": expected an integer >= " + std::to_string(min) +
                                ", got " + std::to_string(x));
            }
            access(c) = x;
          },
          [=](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); }};
}

template <typename E, typename Access>
Field enum_field(const std::string& key, Access access, std::vector<std::pair<std::string, E>> names) {
  return {[=](RunConfig& c, const std::string& v) {
            for (const auto& [name, value] : names) {
              if (v == name) {
                access(c) = value;
                return;
              }
            }
            std::string expected;
            for (const auto& [name, value] : names) {
              expected += (expected.empty() ? "" : " | ") + name;
            }
            throw ConfigError(key + ": expected " + expected + ", got '" + v + "'");
          },
          [=](const RunConfig& c) {
            for (const auto& [name, value] : names) {
              if (access(const_cast<RunConfig&>(c)) == value) return name;
            }
            return std::string("?");
          }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    auto real = [&f](const std::string& key, auto access, Bound bound) {
      f.emplace(key, real_field(key, access, bound));
    };
    f.emplace("geometry", Field{[](RunConfig& c, const std::string& v) {
                                  if (v.empty()) throw ConfigError("geometry: empty value");
                                  c.geometry.source = v;
                                },
                                [](const RunConfig& c) { return c.geometry.source; }});
    real("geometry.r_max", [](RunConfig& c) -> double& { return c.geometry.r_max; }, Bound::Positive);
    real("geometry.z_max", [](RunConfig& c) -> double& { return c.geometry.z_max; }, Bound::Positive);
    real("geometry.h", [](RunConfig& c) -> double& { return c.geometry.h; }, Bound::Positive);
    real("geometry.h_fine", [](RunConfig& c) -> double& { return c.geometry.h_fine; }, Bound::Positive);
    real("geometry.refine_margin", [](RunConfig& c) -> double& { return c.geometry.refine_margin; },
         Bound::NonNegative);
    real("geometry.grading", [](RunConfig& c) -> double& { return c.geometry.grading; },
         Bound::NonNegative);
    real("geometry.min_angle", [](RunConfig& c) -> double& { return c.geometry.min_angle; },
         Bound::NonNegative);

    f.emplace("mode", enum_field<IntegrationMode>(
                          "mode", [](RunConfig& c) -> IntegrationMode& { return c.solver.mode; },
                          {{"planar", IntegrationMode::Planar},
                           {"axisymmetric", IntegrationMode::Axisymmetric}}));
    real("nu0", [](RunConfig& c) -> double& { return c.solver.turbulence.nu0; }, Bound::Positive);
    real("dt", [](RunConfig& c) -> double& { return c.dt; }, Bound::Positive);
    f.emplace("max_steps", int_field("max_steps", [](RunConfig& c) -> int& { return c.max_steps; }, 0));
    real("k.initial", [](RunConfig& c) -> double& { return c.solver.k_initial; }, Bound::Positive);
    real("k_floor", [](RunConfig& c) -> double& { return c.solver.turbulence.k_floor; }, Bound::Positive);
    real("C", [](RunConfig& c) -> double& { return c.solver.turbulence.C; }, Bound::Positive);
    real("C1", [](RunConfig& c) -> double& { return c.solver.turbulence.C1; }, Bound::NonNegative);
    real("C2", [](RunConfig& c) -> double& { return c.solver.turbulence.C2; }, Bound::NonNegative);
    real("C3", [](RunConfig& c) -> double& { return c.solver.turbulence.C3; }, Bound::NonNegative);
    real("tau", [](RunConfig& c) -> double& { return c.solver.turbulence.tau; }, Bound::Positive);
    real("tau_tilde", [](RunConfig& c) -> double& { return c.solver.turbulence.tau_tilde; },
         Bound::Positive);
    real("k_c", [](RunConfig& c) -> double& { return c.solver.turbulence.k_c; }, Bound::Positive);
    real("v2", [](RunConfig& c) -> double& { return c.solver.turbulence.v2; }, Bound::Any);
    for (RegionTag region : kAllRegions) {
      const std::string key = "K." + std::string(to_string(region));
      real(key, [region](RunConfig& c) -> double& { return c.solver.permeability.K[region]; },
           Bound::Positive);
    }

    f.emplace("bc.inlet", enum_field<InletProfile>(
                              "bc.inlet", [](RunConfig& c) -> InletProfile& { return c.bc.inlet; },
                              {{"uniform", InletProfile::Uniform},
                               {"poiseuille", InletProfile::Poiseuille}}));
    real("bc.U0", [](RunConfig& c) -> double& { return c.bc.U0; }, Bound::Any);
    real("bc.D", [](RunConfig& c) -> double& { return c.bc.D; }, Bound::NonNegative);
    real("bc.alpha", [](RunConfig& c) -> double& { return c.bc.alpha; }, Bound::Any);
    f.emplace("bc.lateral", enum_field<LateralCondition>(
                                "bc.lateral",
                                [](RunConfig& c) -> LateralCondition& { return c.bc.lateral; },
                                {{"slip", LateralCondition::Slip},
                                 {"no_slip", LateralCondition::NoSlip}}));
    f.emplace("bc.outlet", enum_field<OutletCondition>(
                               "bc.outlet",
                               [](RunConfig& c) -> OutletCondition& { return c.bc.outlet; },
                               {{"natural", OutletCondition::Natural},
                                {"ghost", OutletCondition::Ghost}}));
    real("bc.k_inlet", [](RunConfig& c) -> double& { return c.bc.k_inlet; }, Bound::NonNegative);
    real("bc.k_lateral", [](RunConfig& c) -> double& { return c.bc.k_lateral; }, Bound::NonNegative);
    f.emplace("bc.k_outlet", enum_field<KOutletCondition>(
                                 "bc.k_outlet",
                                 [](RunConfig& c) -> KOutletCondition& { return c.bc.k_outlet; },
                                 {{"zero_flux", KOutletCondition::ZeroFlux},
                                  {"zero_value", KOutletCondition::ZeroValue}}));

    real("residual.u", [](RunConfig& c) -> double& { return c.tol_u; }, Bound::Positive);
    real("residual.k", [](RunConfig& c) -> double& { return c.tol_k; }, Bound::Positive);

    f.emplace("solver.substeps",
              int_field("solver.substeps", [](RunConfig& c) -> int& { return c.solver.substeps; }, 1));
    f.emplace("solver.limiter", enum_field<bool>(
                                    "solver.limiter",
                                    [](RunConfig& c) -> bool& { return c.solver.limiter; },
                                    {{"true", true}, {"false", false}}));
    f.emplace("solver.production",
              enum_field<ProductionForm>(
                  "solver.production",
                  [](RunConfig& c) -> ProductionForm& { return c.solver.production; },
                  {{"explicit", ProductionForm::Explicit},
                   {"implicit_ratio", ProductionForm::ImplicitRatio}}));
    f.emplace("solver.k_scheme", enum_field<KScheme>(
                                     "solver.k_scheme",
                                     [](RunConfig& c) -> KScheme& { return c.solver.k_scheme; },
                                     {{"low_order", KScheme::LowOrder},
                                      {"galerkin", KScheme::Galerkin}}));
    real("solver.pressure_penalty", [](RunConfig& c) -> double& { return c.solver.pressure_penalty; },
         Bound::NonNegative);
    f.emplace("solver.linear", enum_field<LinearMethod>(
                                   "solver.linear",
                                   [](RunConfig& c) -> LinearMethod& { return c.solver.linear.method; },
                                   {{"direct", LinearMethod::SparseDirect},
                                    {"iterative", LinearMethod::Iterative}}));
    real("solver.tolerance", [](RunConfig& c) -> double& { return c.solver.linear.tolerance; },
         Bound::Positive);
    f.emplace("solver.max_iterations",
              int_field("solver.max_iterations",
                        [](RunConfig& c) -> int& { return c.solver.linear.max_iterations; }, 1));
    real("solver.blowup_factor", [](RunConfig& c) -> double& { return c.solver.blowup_factor; },
         Bound::Positive);

    f.emplace("output.dir", Field{[](RunConfig& c, const std::string& v) {
                                    if (v.empty()) throw ConfigError("output.dir: empty value");
                                    c.output_dir = v;
                                  },
                                  [](const RunConfig& c) { return c.output_dir; }});
    f.emplace("output.vtk_every",
              int_field("output.vtk_every", [](RunConfig& c) -> int& { return c.vtk_every; }, 0));
    f.emplace("profile.z", Field{[](RunConfig& c, const std::string& v) {
                                   std::vector<double> zs;
                                   std::stringstream ss(v);
                                   std::string item;
                                   while (std::getline(ss, item, ',')) {
                                     zs.push_back(parse_real("profile.z", trim(item)));
                                   }
                                   c.profile_z = std::move(zs);
                                 },
                                 [](const RunConfig& c) {
                                   std::string out;
                                   for (double z : c.profile_z) {
                                     out += (out.empty() ? "" : ", ") + format_real(z);
                                   }
                                   return out;
                                 }});
    f.emplace("profile.samples",
              int_field("profile.samples", [](RunConfig& c) -> int& { return c.profile_samples; }, 2));
    return f;
  }();
  return table;
}

}  // namespace

GeometryParams RunConfig::geometry_params() const {
  GeometryParams g = default_net_geometry();
  g.r_max = geometry.r_max;
  g.z_max = geometry.z_max;
  g.h = geometry.h;
  g.h_fine = geometry.h_fine;
  g.refine_margin = geometry.refine_margin;
  g.grading = geometry.grading;
  g.min_angle_deg = geometry.min_angle;
  return g;
}

TimeLoopOptions RunConfig::loop_options() const {
  TimeLoopOptions o;
  o.dt = dt;
  o.max_steps = max_steps;
  o.tol_u = tol_u;
  o.tol_k = tol_k;
  return o;
}

void RunConfig::validate() const {
  if (geometry.min_angle >= 60.0) throw ConfigError("geometry.min_angle: expected a value < 60");
  if (geometry.source == "bundled") {
    for (double z : profile_z) {
      if (z < 0.0 || z > geometry.z_max) {
        throw ConfigError("profile.z: station " + format_real(z) + " lies outside [0, " +
                          format_real(geometry.z_max) + "]");
      }
    }
  }
  bc.validate();
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    it->second.set(config, value);
  }
  config.validate();
  return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown key '" + key + "'");
  it->second.set(config, trim(value));
  config.validate();
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

Mesh build_mesh(const RunConfig& config) {
  if (config.geometry.source == "bundled") return generate_net_geometry(config.geometry_params());
  return load_mesh(config.geometry.source);
}

}  // namespace brinkman
