#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "brinkman/types.hpp"

namespace brinkman {

struct TaggedEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Lateral;
};

/// Boundary edge oriented counter-clockwise along the owning triangle.
struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Lateral;
  int triangle = -1;
  int local_edge = -1;
  int edge = -1;
};

struct BoundaryFacet {
  int a = 0;
  int b = 0;
  Point normal;
  double length = 0.0;
  int triangle = -1;
  int local_edge = -1;
  int edge = -1;
};

struct Location {
  int triangle = -1;
  std::array<double, 3> bary{};
};

struct LocateResult {
  std::optional<Location> location;
  /// Nearest point of the mesh boundary, filled when `location` is empty.
  Point nearest_boundary_point;
  bool found() const { return location.has_value(); }
};

/// Result of walking a straight segment through the triangulation.
struct SegmentWalk {
  int triangle = -1;
  Point end;
  bool clamped = false;  // segment left the mesh; `end` is the exit point
};

/// Unstructured triangular mesh with region and boundary tags.
///
/// Immutable after construction. Triangles are stored counter-clockwise in
/// the (r, z) plane; local edge i is opposite local vertex i.
class Mesh {
 public:
  /// Validates and builds the mesh. Clockwise triangles are reoriented.
  /// Boundary edges missing from `tags` are classified from the bounding box
  /// (z = z_min inlet, z = z_max outlet, r = 0 axis, other sides lateral).
  static Mesh build(std::vector<Point> vertices,
                    std::vector<std::array<int, 3>> triangles,
                    std::vector<RegionTag> regions,
                    std::span<const TaggedEdge> tags = {});

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_triangles() const { return static_cast<int>(triangles_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  RegionTag region(int t) const { return regions_[t]; }
  const std::vector<RegionTag>& regions() const { return regions_; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
  /// Triangle across local edge i of t, or -1 on the boundary.
  int neighbor(int t, int i) const { return neighbors_[t][i]; }
  std::span<const int> vertex_triangles(int v) const;
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

  double area(int t) const;
  Point centroid(int t) const;
  std::array<Point, 3> corners(int t) const;
  std::array<double, 3> barycentric(int t, const Point& x) const;

  Point min_corner() const { return lo_; }
  Point max_corner() const { return hi_; }
  double diameter() const { return norm(hi_ - lo_); }

  /// Containing triangle with barycentrics. Ties on shared edges or vertices
  /// go to the lowest triangle index. Outside points yield the nearest
  /// boundary point instead.
  LocateResult locate(const Point& x, std::optional<int> hint = {}) const;

  /// Walks from `from` (inside triangle `start`) towards `to`. Stops at the
  /// triangle containing `to` or at the boundary exit point.
  SegmentWalk walk(int start, const Point& from, const Point& to) const;

  Point nearest_boundary_point(const Point& x) const;

 private:
  Mesh() = default;
  std::optional<int> scan(const Point& x) const;
  int tie_break(int t, const Point& x) const;

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<RegionTag> regions_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<int> vertex_triangle_offsets_;
  std::vector<int> vertex_triangle_list_;
  std::vector<BoundaryEdge> boundary_;
  Point lo_;
  Point hi_;
};

/// Reads the native text format (see docs/mesh_format.md).
Mesh load_mesh(const std::filesystem::path& path);
Mesh parse_mesh(std::string_view text);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const Mesh& mesh);

/// Per-triangle longest edge length; used as the mixing length.
std::vector<double> longest_edge_field(const Mesh& mesh);

std::vector<BoundaryFacet> boundary_facets(const Mesh& mesh, BoundaryTag tag);

}  // namespace brinkman
