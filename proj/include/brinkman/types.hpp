#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace brinkman {

/// Point of the meridian half-plane. `r` is the radial coordinate (x in
/// planar mode), `z` the axial coordinate along the flow.
struct Point {
  double r = 0.0;
  double z = 0.0;

  friend Point operator+(Point a, Point b) { return {a.r + b.r, a.z + b.z}; }
  friend Point operator-(Point a, Point b) { return {a.r - b.r, a.z - b.z}; }
  friend Point operator*(double s, Point a) { return {s * a.r, s * a.z}; }
  friend Point operator*(Point a, double s) { return {s * a.r, s * a.z}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.r * b.r + a.z * b.z; }
inline double cross(Point a, Point b) { return a.r * b.z - a.z * b.r; }
inline double norm(Point a) { return std::hypot(a.r, a.z); }

enum class RegionTag : std::uint8_t { Fluid, Catch, Collar, Net1, Net2, Net3 };
inline constexpr std::array<RegionTag, 6> kAllRegions = {
    RegionTag::Fluid, RegionTag::Catch, RegionTag::Collar,
    RegionTag::Net1,  RegionTag::Net2,  RegionTag::Net3};

enum class BoundaryTag : std::uint8_t { Inlet, Lateral, Outlet, Axis };
inline constexpr std::array<BoundaryTag, 4> kAllBoundaryTags = {
    BoundaryTag::Inlet, BoundaryTag::Lateral, BoundaryTag::Outlet,
    BoundaryTag::Axis};

/// Planar integrates with weight 1; axisymmetric with |r| * pi.
enum class IntegrationMode { Planar, Axisymmetric };

std::string_view to_string(RegionTag tag);
std::string_view to_string(BoundaryTag tag);
std::string_view to_string(IntegrationMode mode);
RegionTag parse_region(std::string_view name);
BoundaryTag parse_boundary_tag(std::string_view name);
IntegrationMode parse_mode(std::string_view name);

inline double measure_weight(IntegrationMode mode, const Point& x) {
  constexpr double kPi = 3.14159265358979323846;
  return mode == IntegrationMode::Axisymmetric ? std::abs(x.r) * kPi : 1.0;
}

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace brinkman
