#pragma once

#include <vector>

#include "brinkman/mesh.hpp"

namespace brinkman {

/// Closed polygon (last vertex connects back to the first) carving a region.
struct RegionPolygon {
  RegionTag region = RegionTag::Catch;
  std::vector<Point> vertices;
};

struct GeometryParams {
  double r_max = 0.6;
  double z_max = 2.0;
  double h = 0.08;        // target edge length away from the obstacles
  double h_fine = 0.015;  // target edge length around the obstacles
  double refine_margin = 0.1;
  double grading = 0.3;   // growth of the spacing per metre away from the band
  double min_angle_deg = 15.0;
  /// Later polygons win where polygons overlap.
  std::vector<RegionPolygon> obstacles;
};

/// Parametric stand-in for the trawl net: conical membrane band split into
/// three equal-z parts, half-ellipse catch on the axis, collar ring at the
/// mouth. Not the measured net profile.
GeometryParams default_net_geometry();

/// Tagged triangulation of [0, r_max] x [0, z_max]. Triangles are tagged by
/// centroid; the grid is refined around the obstacle bounding box.
/// Polygons must stay strictly inside the box, except that they may lie on
/// the symmetry axis r = 0.
Mesh generate_net_geometry(const GeometryParams& params);

/// Uniform criss-cross triangulation of [lo, hi], one region.
Mesh structured_box_mesh(Point lo, Point hi, int nr, int nz,
                         RegionTag region = RegionTag::Fluid);

bool point_in_polygon(const Point& x, const std::vector<Point>& polygon);

}  // namespace brinkman
