#include "brinkman/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace brinkman {

namespace {

constexpr double kBaryEps = 1e-12;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::array<Enum, N>& values,
                const char* what) {
  for (Enum v : values) {
    if (to_string(v) == name) return v;
  }
  throw Error(std::string("unknown ") + what + " '" + std::string(name) + "'");
}

}  // namespace

std::string_view to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::Fluid: return "fluid";
    case RegionTag::Catch: return "catch";
    case RegionTag::Collar: return "collar";
    case RegionTag::Net1: return "net1";
    case RegionTag::Net2: return "net2";
    case RegionTag::Net3: return "net3";
  }
  return "?";
}

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Inlet: return "inlet";
    case BoundaryTag::Lateral: return "lateral";
    case BoundaryTag::Outlet: return "outlet";
    case BoundaryTag::Axis: return "axis";
  }
  return "?";
}

std::string_view to_string(IntegrationMode mode) {
  return mode == IntegrationMode::Planar ? "planar" : "axisymmetric";
}

RegionTag parse_region(std::string_view name) {
  return parse_enum(name, kAllRegions, "region");
}

BoundaryTag parse_boundary_tag(std::string_view name) {
  return parse_enum(name, kAllBoundaryTags, "boundary tag");
}

IntegrationMode parse_mode(std::string_view name) {
  if (name == "planar") return IntegrationMode::Planar;
  if (name == "axisymmetric") return IntegrationMode::Axisymmetric;
  throw Error("unknown mode '" + std::string(name) + "'");
}

Mesh Mesh::build(std::vector<Point> vertices,
                 std::vector<std::array<int, 3>> triangles,
                 std::vector<RegionTag> regions,
                 std::span<const TaggedEdge> tags) {
  if (triangles.empty()) throw TopologyError("mesh has no triangles");
  if (regions.size() != triangles.size()) {
    throw TopologyError("region list length differs from triangle count");
  }
  const int nv = static_cast<int>(vertices.size());
  std::vector<int> use_count(nv, 0);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    auto& tri = triangles[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) {
        throw TopologyError("triangle " + std::to_string(t) +
                            " references vertex " + std::to_string(v) +
                            " outside [0, " + std::to_string(nv) + ")");
      }
      ++use_count[v];
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw TopologyError("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const double a2 = cross(vertices[tri[1]] - vertices[tri[0]],
                            vertices[tri[2]] - vertices[tri[0]]);
    if (a2 == 0.0) {
      throw TopologyError("triangle " + std::to_string(t) + " is degenerate");
    }
    if (a2 < 0.0) std::swap(tri[1], tri[2]);
  }
  for (int v = 0; v < nv; ++v) {
    if (use_count[v] == 0) {
      throw TopologyError("dangling vertex " + std::to_string(v));
    }
  }

  Mesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  mesh.regions_ = std::move(regions);
  const int nt = mesh.n_triangles();

  mesh.lo_ = mesh.hi_ = mesh.vertices_.front();
  for (const Point& p : mesh.vertices_) {
    mesh.lo_ = {std::min(mesh.lo_.r, p.r), std::min(mesh.lo_.z, p.z)};
    mesh.hi_ = {std::max(mesh.hi_.r, p.r), std::max(mesh.hi_.z, p.z)};
  }

  // Edges and neighbours.
  std::map<std::pair<int, int>, int> edge_index;
  std::vector<std::vector<std::pair<int, int>>> edge_owners;
  mesh.triangle_edges_.resize(nt);
  mesh.neighbors_.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace(key, mesh.n_edges());
      if (inserted) {
        mesh.edges_.push_back({key.first, key.second});
        edge_owners.emplace_back();
      }
      edge_owners[it->second].emplace_back(t, i);
      mesh.triangle_edges_[t][i] = it->second;
    }
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto& owners = edge_owners[e];
    if (owners.size() > 2) {
      throw TopologyError("non-manifold edge (" +
                          std::to_string(mesh.edges_[e][0]) + ", " +
                          std::to_string(mesh.edges_[e][1]) + ") shared by " +
                          std::to_string(owners.size()) + " triangles");
    }
    if (owners.size() == 2) {
      mesh.neighbors_[owners[0].first][owners[0].second] = owners[1].first;
      mesh.neighbors_[owners[1].first][owners[1].second] = owners[0].first;
    }
  }

  // Vertex -> triangle adjacency (CSR).
  mesh.vertex_triangle_offsets_.assign(nv + 1, 0);
  for (const auto& tri : mesh.triangles_) {
    for (int v : tri) ++mesh.vertex_triangle_offsets_[v + 1];
  }
  for (int v = 0; v < nv; ++v) {
    mesh.vertex_triangle_offsets_[v + 1] += mesh.vertex_triangle_offsets_[v];
  }
  mesh.vertex_triangle_list_.resize(mesh.vertex_triangle_offsets_[nv]);
  {
    std::vector<int> fill(mesh.vertex_triangle_offsets_.begin(),
                          mesh.vertex_triangle_offsets_.end() - 1);
    for (int t = 0; t < nt; ++t) {
      for (int v : mesh.triangles_[t]) mesh.vertex_triangle_list_[fill[v]++] = t;
    }
  }

  // Boundary edges and tags.
  std::map<std::pair<int, int>, BoundaryTag> explicit_tags;
  for (const TaggedEdge& te : tags) {
    const auto key = std::minmax(te.a, te.b);
    auto it = edge_index.find(key);
    if (it == edge_index.end() || edge_owners[it->second].size() != 1) {
      throw TopologyError("tagged edge (" + std::to_string(te.a) + ", " +
                          std::to_string(te.b) + ") is not a boundary edge");
    }
    auto [pos, inserted] = explicit_tags.emplace(key, te.tag);
    if (!inserted && pos->second != te.tag) {
      throw TopologyError("edge (" + std::to_string(te.a) + ", " +
                          std::to_string(te.b) + ") tagged twice");
    }
  }
  const double tol = 1e-9 * std::max(mesh.diameter(), 1e-300);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (edge_owners[e].size() != 1) continue;
    const auto [t, i] = edge_owners[e].front();
    const auto& tri = mesh.triangles_[t];
    BoundaryEdge be;
    be.a = tri[(i + 1) % 3];
    be.b = tri[(i + 2) % 3];
    be.triangle = t;
    be.local_edge = i;
    be.edge = e;
    if (auto it = explicit_tags.find(std::minmax(be.a, be.b));
        it != explicit_tags.end()) {
      be.tag = it->second;
    } else {
      const Point pa = mesh.vertices_[be.a];
      const Point pb = mesh.vertices_[be.b];
      auto on = [tol](double x, double y, double c) {
        return std::abs(x - c) <= tol && std::abs(y - c) <= tol;
      };
      const Point d = pb - pa;
      const Point n{d.z, -d.r};  // outward for counter-clockwise triangles
      if (on(pa.z, pb.z, mesh.lo_.z)) {
        be.tag = BoundaryTag::Inlet;
      } else if (on(pa.z, pb.z, mesh.hi_.z)) {
        be.tag = BoundaryTag::Outlet;
      } else if (on(pa.r, pb.r, mesh.lo_.r)) {
        be.tag = std::abs(mesh.lo_.r) <= tol ? BoundaryTag::Axis
                                             : BoundaryTag::Lateral;
      } else if (on(pa.r, pb.r, mesh.hi_.r)) {
        be.tag = BoundaryTag::Lateral;
      } else if (std::abs(n.z) > std::abs(n.r)) {
        be.tag = n.z < 0 ? BoundaryTag::Inlet : BoundaryTag::Outlet;
      } else {
        be.tag = BoundaryTag::Lateral;
      }
    }
    mesh.boundary_.push_back(be);
  }
  return mesh;
}

std::span<const int> Mesh::vertex_triangles(int v) const {
  const int b = vertex_triangle_offsets_[v];
  const int e = vertex_triangle_offsets_[v + 1];
  return {vertex_triangle_list_.data() + b, static_cast<std::size_t>(e - b)};
}

double Mesh::area(int t) const {
  const auto& tri = triangles_[t];
  return 0.5 * cross(vertices_[tri[1]] - vertices_[tri[0]],
                     vertices_[tri[2]] - vertices_[tri[0]]);
}

Point Mesh::centroid(int t) const {
  const auto c = corners(t);
  return {(c[0].r + c[1].r + c[2].r) / 3.0, (c[0].z + c[1].z + c[2].z) / 3.0};
}

std::array<Point, 3> Mesh::corners(int t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

std::array<double, 3> Mesh::barycentric(int t, const Point& x) const {
  const auto c = corners(t);
  const double a2 = cross(c[1] - c[0], c[2] - c[0]);
  return {cross(c[1] - x, c[2] - x) / a2, cross(c[2] - x, c[0] - x) / a2,
          cross(c[0] - x, c[1] - x) / a2};
}

namespace {

bool contains(const std::array<double, 3>& l) {
  return l[0] >= -kBaryEps && l[1] >= -kBaryEps && l[2] >= -kBaryEps;
}

std::array<double, 3> clamp_bary(std::array<double, 3> l) {
  double s = 0.0;
  for (double& v : l) {
    v = std::clamp(v, 0.0, 1.0);
    s += v;
  }
  for (double& v : l) v /= s;
  return l;
}

}  // namespace

int Mesh::tie_break(int t, const Point& x) const {
  const auto l = barycentric(t, x);
  if (l[0] > kBaryEps && l[1] > kBaryEps && l[2] > kBaryEps) return t;
  int best = t;
  for (int v : triangles_[t]) {
    for (int c : vertex_triangles(v)) {
      if (c < best && contains(barycentric(c, x))) best = c;
    }
  }
  return best;
}

std::optional<int> Mesh::scan(const Point& x) const {
  for (int t = 0; t < n_triangles(); ++t) {
    if (contains(barycentric(t, x))) return t;
  }
  return std::nullopt;
}

SegmentWalk Mesh::walk(int t, const Point& from, const Point& to) const {
  Point a = from;
  const int max_steps = 4 * n_triangles() + 16;
  for (int step = 0; step < max_steps; ++step) {
    const auto lb = barycentric(t, to);
    if (contains(lb)) return {t, to, false};
    auto la = barycentric(t, a);
    for (double& v : la) v = std::max(v, 0.0);
    int exit = -1;
    double best_s = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      if (lb[i] >= -kBaryEps) continue;
      const double s = la[i] / (la[i] - lb[i]);
      if (s < best_s - 1e-14 ||
          (s <= best_s + 1e-14 && exit >= 0 && lb[i] < lb[exit])) {
        best_s = std::min(best_s, s);
        exit = i;
      }
    }
    const Point p = a + best_s * (to - a);
    const int nb = neighbors_[t][exit];
    if (nb < 0) return {t, p, true};
    t = nb;
    a = p;
  }
  return {-1, to, false};
}

Point Mesh::nearest_boundary_point(const Point& x) const {
  Point best = x;
  double best_d = std::numeric_limits<double>::infinity();
  for (const BoundaryEdge& be : boundary_) {
    const Point a = vertices_[be.a];
    const Point d = vertices_[be.b] - a;
    const double s = std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
    const Point p = a + s * d;
    const double dist = norm(x - p);
    if (dist < best_d) {
      best_d = dist;
      best = p;
    }
  }
  return best;
}

LocateResult Mesh::locate(const Point& x, std::optional<int> hint) const {
  LocateResult result;
  int start = hint.value_or(0);
  if (start < 0 || start >= n_triangles()) start = 0;
  const SegmentWalk w = walk(start, centroid(start), x);
  std::optional<int> found;
  if (w.triangle >= 0 && !w.clamped) {
    found = w.triangle;
  } else {
    found = scan(x);
  }
  if (!found) {
    result.nearest_boundary_point = nearest_boundary_point(x);
    return result;
  }
  const int t = tie_break(*found, x);
  result.location = Location{t, clamp_bary(barycentric(t, x))};
  return result;
}

// ---------------------------------------------------------------------------
// Native text format

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;

  explicit LineReader(std::string_view text) : in(std::string(text)) {}

  // Next non-empty, non-comment line split into tokens.
  std::optional<std::vector<std::string>> next() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      std::istringstream ls(line);
      std::vector<std::string> tokens;
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    return std::nullopt;
  }
};

template <typename T>
T number(const std::string& tok, int line) {
  T value{};
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
  return value;
}

int section(LineReader& reader, const char* name) {
  auto tokens = reader.next();
  if (!tokens || tokens->size() != 2 || (*tokens)[0] != name) {
    throw ParseError(std::string("expected '") + name + " <count>'",
                     reader.line_no);
  }
  const int count = number<int>((*tokens)[1], reader.line_no);
  if (count < 0) throw ParseError("negative count", reader.line_no);
  return count;
}

std::vector<std::string> row(LineReader& reader, std::size_t width,
                             const char* what) {
  auto tokens = reader.next();
  if (!tokens) {
    throw ParseError(std::string("unexpected end of file in ") + what,
                     reader.line_no + 1);
  }
  if (tokens->size() != width) {
    throw ParseError(std::string("expected ") + std::to_string(width) +
                         " fields in " + what,
                     reader.line_no);
  }
  return *tokens;
}

}  // namespace

Mesh parse_mesh(std::string_view text) {
  LineReader reader(text);
  const int nv = section(reader, "vertices");
  std::vector<Point> vertices(nv);
  for (auto& v : vertices) {
    const auto t = row(reader, 2, "vertices");
    v = {number<double>(t[0], reader.line_no), number<double>(t[1], reader.line_no)};
  }
  const int nt = section(reader, "triangles");
  std::vector<std::array<int, 3>> triangles(nt);
  std::vector<RegionTag> regions(nt);
  for (int i = 0; i < nt; ++i) {
    const auto t = row(reader, 4, "triangles");
    for (int j = 0; j < 3; ++j) {
      triangles[i][j] = number<int>(t[j], reader.line_no);
      if (triangles[i][j] < 0 || triangles[i][j] >= nv) {
        throw TopologyError("line " + std::to_string(reader.line_no) +
                            ": vertex index " + t[j] + " out of range");
      }
    }
    try {
      regions[i] = parse_region(t[3]);
    } catch (const Error& e) {
      throw ParseError(e.what(), reader.line_no);
    }
  }
  std::vector<TaggedEdge> tags;
  if (auto tokens = reader.next()) {
    if (tokens->size() != 2 || (*tokens)[0] != "boundary") {
      throw ParseError("expected 'boundary <count>'", reader.line_no);
    }
    const int nb = number<int>((*tokens)[1], reader.line_no);
    tags.resize(nb);
    for (auto& te : tags) {
      const auto t = row(reader, 3, "boundary");
      te.a = number<int>(t[0], reader.line_no);
      te.b = number<int>(t[1], reader.line_no);
      if (te.a < 0 || te.a >= nv || te.b < 0 || te.b >= nv) {
        throw TopologyError("line " + std::to_string(reader.line_no) +
                            ": boundary vertex index out of range");
      }
      try {
        te.tag = parse_boundary_tag(t[2]);
      } catch (const Error& e) {
        throw ParseError(e.what(), reader.line_no);
      }
    }
    if (reader.next()) {
      throw ParseError("trailing content after boundary section", reader.line_no);
    }
  }
  return Mesh::build(std::move(vertices), std::move(triangles),
                     std::move(regions), tags);
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_mesh(buffer.str());
}

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "# brinkman native mesh\n";
  out << "vertices " << mesh.n_vertices() << "\n";
  for (const Point& p : mesh.vertices()) out << p.r << " " << p.z << "\n";
  out << "triangles " << mesh.n_triangles() << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangle(t);
    out << tri[0] << " " << tri[1] << " " << tri[2] << " "
        << to_string(mesh.region(t)) << "\n";
  }
  out << "boundary " << mesh.boundary_edges().size() << "\n";
  for (const BoundaryEdge& be : mesh.boundary_edges()) {
    out << be.a << " " << be.b << " " << to_string(be.tag) << "\n";
  }
  return out.str();
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file '" + path.string() + "'");
  out << format_mesh(mesh);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<double> longest_edge_field(const Mesh& mesh) {
  std::vector<double> ell(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto c = mesh.corners(t);
    ell[t] = std::max({norm(c[1] - c[0]), norm(c[2] - c[1]), norm(c[0] - c[2])});
  }
  return ell;
}

std::vector<BoundaryFacet> boundary_facets(const Mesh& mesh, BoundaryTag tag) {
  std::vector<BoundaryFacet> facets;
  for (const BoundaryEdge& be : mesh.boundary_edges()) {
    if (be.tag != tag) continue;
    const Point d = mesh.vertex(be.b) - mesh.vertex(be.a);
    const double len = norm(d);
    facets.push_back({be.a, be.b, Point{d.z / len, -d.r / len}, len,
                      be.triangle, be.local_edge, be.edge});
  }
  return facets;
}

}  // namespace brinkman
