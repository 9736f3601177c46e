#pragma once

#include <optional>
#include <vector>

#include "brinkman/fem.hpp"

namespace brinkman {

struct TracePoint {
  Point position;
  int triangle = -1;
  bool clamped = false;  // the path left the domain; position is the exit point
};

/// Foot of the characteristic through x: explicit Euler substeps of
/// dX/ds = u(X) integrated backwards over dt. With one substep this is
/// x - u(x) dt.
TracePoint trace_back(const Point& x, const DiscreteField& velocity, double dt, int substeps,
                      std::optional<int> hint = {});

struct ComposeOptions {
  int substeps = 4;
  /// Clip each traced value to the nodal range of the element it falls in.
  bool limit = false;
  int threads = 0;  // 0: use worker_count()
};

/// Field with coefficients b(X(dof)) at every dof of b's space.
DiscreteField compose_field(const DiscreteField& b, const DiscreteField& velocity, double dt,
                            const ComposeOptions& options = {});

/// Traces every dof point of `space` (shared by several compositions).
std::vector<TracePoint> trace_dofs(const FunctionSpace& space, const DiscreteField& velocity,
                                   double dt, int substeps, int threads = 0);

DiscreteField compose_traced(const DiscreteField& b, const std::vector<TracePoint>& traces,
                             bool limit, int threads = 0);

/// Worker threads: hardware concurrency capped by BRINKMAN_RANS_THREADS.
int worker_count();

}  // namespace brinkman
