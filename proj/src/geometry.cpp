#include "brinkman/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace brinkman {

namespace {

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  auto orient = [](Point a, Point b, Point c) { return cross(b - a, c - a); };
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](Point a, Point b, Point c) {
    return std::min(a.r, b.r) <= c.r && c.r <= std::max(a.r, b.r) &&
           std::min(a.z, b.z) <= c.z && c.z <= std::max(a.z, b.z);
  };
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

void check_polygon(const RegionPolygon& poly, const GeometryParams& params,
                   std::size_t index) {
  const auto& v = poly.vertices;
  const std::string name =
      "obstacle " + std::to_string(index) + " (" + std::string(to_string(poly.region)) + ")";
  if (poly.region == RegionTag::Fluid) {
    throw GeometryError(name + ": obstacles cannot carve the fluid region");
  }
  if (v.size() < 3) throw GeometryError(name + ": polygon needs at least 3 vertices");
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    if (a == b) throw GeometryError(name + ": repeated vertex");
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex; skip them.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, v[j], v[(j + 1) % n])) {
        throw GeometryError(name + ": polyline self-intersects");
      }
    }
    if (a.r < 0.0 || a.r >= params.r_max || a.z <= 0.0 || a.z >= params.z_max) {
      throw GeometryError(name + ": polygon touches or leaves the box boundary");
    }
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross(v[i], v[(i + 1) % n]);
  if (std::abs(area2) < 1e-14) throw GeometryError(name + ": zero-area polygon");
}

// Grid coordinates on [0, length] with spacing h_fine inside [lo, hi] and a
// linear growth towards h outside.
std::vector<double> graded_axis(double length, double lo, double hi, double h,
                                double h_fine, double grading) {
  auto spacing = [&](double x) {
    const double d = x < lo ? lo - x : (x > hi ? x - hi : 0.0);
    return std::min(h, h_fine + grading * d);
  };
  constexpr int kSamples = 20000;
  std::vector<double> cumulative(kSamples + 1, 0.0);
  const double dx = length / kSamples;
  for (int i = 0; i < kSamples; ++i) {
    cumulative[i + 1] = cumulative[i] + dx / spacing((i + 0.5) * dx);
  }
  const int cells = std::max(1, static_cast<int>(std::ceil(cumulative.back() - 1e-9)));
  std::vector<double> coords(cells + 1);
  coords.front() = 0.0;
  coords.back() = length;
  for (int c = 1; c < cells; ++c) {
    const double target = cumulative.back() * c / cells;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    const int i = static_cast<int>(it - cumulative.begin());
    const double frac = (target - cumulative[i - 1]) / (cumulative[i] - cumulative[i - 1]);
    coords[c] = (i - 1 + frac) * dx;
  }
  return coords;
}

Mesh criss_cross(const std::vector<double>& rs, const std::vector<double>& zs,
                 const std::vector<RegionPolygon>& obstacles) {
  const int nr = static_cast<int>(rs.size());
  const int nz = static_cast<int>(zs.size());
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nr) * nz);
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nr; ++i) vertices.push_back({rs[i], zs[j]});
  }
  auto id = [nr](int i, int j) { return j * nr + i; };
  std::vector<std::array<int, 3>> triangles;
  for (int j = 0; j + 1 < nz; ++j) {
    for (int i = 0; i + 1 < nr; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      } else {
        triangles.push_back({a, b, d});
        triangles.push_back({b, c, d});
      }
    }
  }
  std::vector<RegionTag> regions(triangles.size(), RegionTag::Fluid);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    const Point c = (1.0 / 3.0) * (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]);
    for (const RegionPolygon& poly : obstacles) {
      if (point_in_polygon(c, poly.vertices)) regions[t] = poly.region;
    }
  }
  return Mesh::build(std::move(vertices), std::move(triangles), std::move(regions));
}

double min_angle_deg(const Mesh& mesh) {
  double worst = 180.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto c = mesh.corners(t);
    for (int i = 0; i < 3; ++i) {
      const Point u = c[(i + 1) % 3] - c[i];
      const Point w = c[(i + 2) % 3] - c[i];
      const double angle = std::atan2(std::abs(cross(u, w)), dot(u, w));
      worst = std::min(worst, angle * 180.0 / std::numbers::pi);
    }
  }
  return worst;
}

}  // namespace

bool point_in_polygon(const Point& x, const std::vector<Point>& polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = polygon[i];
    const Point b = polygon[j];
    if ((a.z > x.z) != (b.z > x.z)) {
      const double r_cross = a.r + (x.z - a.z) * (b.r - a.r) / (b.z - a.z);
      if (x.r < r_cross) inside = !inside;
    }
  }
  return inside;
}

GeometryParams default_net_geometry() {
  GeometryParams params;

  // Collar ring at the net mouth.
  params.obstacles.push_back(
      {RegionTag::Collar, {{0.12, 0.07}, {0.19, 0.07}, {0.19, 0.10}, {0.12, 0.10}}});

  // Conical membrane band around the line (0.15, 0.1) -> (0.225, 0.75).
  const Point start{0.15, 0.1};
  const Point end{0.225, 0.75};
  const double half_thickness = 0.02;
  auto line_r = [&](double z) {
    return start.r + (end.r - start.r) * (z - start.z) / (end.z - start.z);
  };
  const std::array<RegionTag, 3> parts = {RegionTag::Net1, RegionTag::Net2,
                                          RegionTag::Net3};
  for (int i = 0; i < 3; ++i) {
    const double za = start.z + (end.z - start.z) * i / 3.0;
    const double zb = start.z + (end.z - start.z) * (i + 1) / 3.0;
    params.obstacles.push_back({parts[i],
                                {{line_r(za) - half_thickness, za},
                                 {line_r(za) + half_thickness, za},
                                 {line_r(zb) + half_thickness, zb},
                                 {line_r(zb) - half_thickness, zb}}});
  }

  // Half-ellipse catch centred on the axis.
  RegionPolygon catch_poly{RegionTag::Catch, {}};
  constexpr int kArc = 48;
  for (int i = 0; i <= kArc; ++i) {
    const double theta = -std::numbers::pi / 2 + std::numbers::pi * i / kArc;
    catch_poly.vertices.push_back(
        {std::max(0.0, 0.12 * std::cos(theta)), 0.85 + 0.15 * std::sin(theta)});
  }
  params.obstacles.push_back(std::move(catch_poly));
  return params;
}

Mesh generate_net_geometry(const GeometryParams& params) {
  if (!(params.r_max > 0.0) || !(params.z_max > 0.0)) {
    throw GeometryError("box dimensions must be positive");
  }
  if (!(params.h > 0.0) || !(params.h_fine > 0.0)) {
    throw GeometryError("target edge lengths must be positive");
  }
  for (std::size_t i = 0; i < params.obstacles.size(); ++i) {
    check_polygon(params.obstacles[i], params, i);
  }

  std::vector<double> rs;
  std::vector<double> zs;
  if (params.obstacles.empty()) {
    rs = graded_axis(params.r_max, 0.0, params.r_max, params.h, params.h, 0.0);
    zs = graded_axis(params.z_max, 0.0, params.z_max, params.h, params.h, 0.0);
  } else {
    Point lo = params.obstacles.front().vertices.front();
    Point hi = lo;
    for (const auto& poly : params.obstacles) {
      for (const Point& p : poly.vertices) {
        lo = {std::min(lo.r, p.r), std::min(lo.z, p.z)};
        hi = {std::max(hi.r, p.r), std::max(hi.z, p.z)};
      }
    }
    const double m = params.refine_margin;
    const double h_fine = std::min(params.h_fine, params.h);
    rs = graded_axis(params.r_max, lo.r - m, hi.r + m, params.h, h_fine, params.grading);
    zs = graded_axis(params.z_max, lo.z - m, hi.z + m, params.h, h_fine, params.grading);
  }

  Mesh mesh = criss_cross(rs, zs, params.obstacles);
  if (const double angle = min_angle_deg(mesh); angle < params.min_angle_deg) {
    throw GeometryError("mesh quality below minimum: smallest angle " +
                        std::to_string(angle) + " deg");
  }
  return mesh;
}

Mesh structured_box_mesh(Point lo, Point hi, int nr, int nz, RegionTag region) {
  if (nr < 1 || nz < 1) throw GeometryError("need at least one cell per direction");
  std::vector<double> rs(nr + 1);
  std::vector<double> zs(nz + 1);
  for (int i = 0; i <= nr; ++i) rs[i] = lo.r + (hi.r - lo.r) * i / nr;
  for (int j = 0; j <= nz; ++j) zs[j] = lo.z + (hi.z - lo.z) * j / nz;
  rs.back() = hi.r;
  zs.back() = hi.z;
  std::vector<RegionPolygon> none;
  Mesh mesh = criss_cross(rs, zs, none);
  if (region == RegionTag::Fluid) return mesh;
  std::vector<Point> vertices = mesh.vertices();
  std::vector<std::array<int, 3>> triangles = mesh.triangles();
  std::vector<RegionTag> regions(triangles.size(), region);
  return Mesh::build(std::move(vertices), std::move(triangles), std::move(regions));
}

}  // namespace brinkman
