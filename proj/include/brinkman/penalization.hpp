#pragma once

#include <map>
#include <vector>

#include "brinkman/assembly.hpp"

namespace brinkman {

/// Permeability K per region, in s^-1 as tabulated for the trawl net. The
/// momentum equation gains (1/K) u.
struct PermeabilityTable {
  std::map<RegionTag, double> K = {
      {RegionTag::Fluid, 1e4}, {RegionTag::Catch, 1e-6}, {RegionTag::Collar, 1e-6},
      {RegionTag::Net1, 1.0},  {RegionTag::Net2, 5.0},   {RegionTag::Net3, 6.0}};
};

/// Per-triangle penalty coefficient 1 / K(region).
std::vector<double> coefficient_field(const Mesh& mesh, const PermeabilityTable& table);

/// c-weighted vector mass matrix on the P2 velocity space.
SparseMatrix assemble_penalty(const FunctionSpace& space, const std::vector<double>& coefficient,
                              IntegrationMode mode);

}  // namespace brinkman
