#include "brinkman/characteristics.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace brinkman {

namespace {

std::array<double, 3> clamped_bary(const Mesh& mesh, int t, const Point& x) {
  auto l = mesh.barycentric(t, x);
  double s = 0.0;
  for (double& v : l) {
    v = std::clamp(v, 0.0, 1.0);
    s += v;
  }
  for (double& v : l) v /= s;
  return l;
}

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 0) threads = worker_count();
  threads = std::clamp(threads, 1, std::max(1, n / 256));
  if (threads == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("BRINKMAN_RANS_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return n;
}

TracePoint trace_back(const Point& x, const DiscreteField& velocity, double dt, int substeps,
                      std::optional<int> hint) {
  if (!(dt > 0.0)) throw Error("trace_back needs dt > 0");
  if (substeps < 1) throw Error("trace_back needs at least one substep");
  const Mesh& mesh = velocity.space().mesh();
  const LocateResult start = mesh.locate(x, hint);
  if (!start.found()) {
    const Point p = mesh.nearest_boundary_point(x);
    const LocateResult on = mesh.locate(p);
    return {p, on.found() ? on.location->triangle : -1, true};
  }
  int t = start.location->triangle;
  Point pos = x;
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    const FieldValue u = velocity.value_in_cell(t, clamped_bary(mesh, t, pos));
    if (u[0] == 0.0 && u[1] == 0.0) continue;
    const Point target{pos.r - h * u[0], pos.z - h * u[1]};
    const SegmentWalk w = mesh.walk(t, pos, target);
    if (w.triangle < 0) {
      // Walk failed on a degenerate configuration; fall back to locate.
      const LocateResult loc = mesh.locate(target, t);
      if (!loc.found()) {
        const Point p = mesh.nearest_boundary_point(target);
        const LocateResult on = mesh.locate(p, t);
        return {p, on.found() ? on.location->triangle : t, true};
      }
      t = loc.location->triangle;
      pos = target;
      continue;
    }
    t = w.triangle;
    pos = w.end;
    if (w.clamped) return {pos, t, true};
  }
  return {pos, t, false};
}

std::vector<TracePoint> trace_dofs(const FunctionSpace& space, const DiscreteField& velocity,
                                   double dt, int substeps, int threads) {
  if (&space.mesh() != &velocity.space().mesh()) {
    throw Error("traced space and velocity must share the mesh");
  }
  std::vector<TracePoint> traces(space.n_dofs());
  parallel_for(space.n_dofs(), threads, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      traces[i] = trace_back(space.dof_point(i), velocity, dt, substeps, space.dof_cell(i));
    }
  });
  return traces;
}

DiscreteField compose_traced(const DiscreteField& b, const std::vector<TracePoint>& traces,
                             bool limit, int threads) {
  const FunctionSpace& space = b.space();
  if (static_cast<int>(traces.size()) != space.n_dofs()) {
    throw Error("trace count does not match the field's dofs");
  }
  const Mesh& mesh = space.mesh();
  DiscreteField out(b.space_ptr(), b.components());
  parallel_for(space.n_dofs(), threads, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const TracePoint& tp = traces[i];
      if (tp.position == space.dof_point(i)) {
        for (int c = 0; c < b.components(); ++c) out.at(c, i) = b.at(c, i);
        continue;
      }
      const FieldValue v = b.value_in_cell(tp.triangle, clamped_bary(mesh, tp.triangle, tp.position));
      for (int c = 0; c < b.components(); ++c) {
        double value = v[c];
        if (limit) {
          const auto [lo, hi] = b.cell_range(c, tp.triangle);
          value = std::clamp(value, lo, hi);
        }
        out.at(c, i) = value;
      }
    }
  });
  return out;
}

DiscreteField compose_field(const DiscreteField& b, const DiscreteField& velocity, double dt,
                            const ComposeOptions& options) {
  if (&b.space().mesh() != &velocity.space().mesh()) {
    throw Error("composed field and velocity must share the mesh");
  }
  const auto traces = trace_dofs(b.space(), velocity, dt, options.substeps, options.threads);
  return compose_traced(b, traces, options.limit, options.threads);
}

}  // namespace brinkman
