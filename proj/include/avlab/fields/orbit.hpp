#pragma once

#include <functional>
#include <vector>

#include "avlab/common/types.hpp"
#include "avlab/fields/flow.hpp"
#include "avlab/fields/hamiltonian.hpp"

namespace avlab {

/// φ_dt(x) for the shear field of `sys`, with |H(out) − H(x)| ≤ tol·(1 + |H(x)|).
Vec2 flow_step(const HamiltonianSystem2D& sys, const Vec2& x, double dt, double tol = 1e-10);

/// Adaptive integrator for the shear field of `sys`, monitoring H and the box.
inline auto planar_flow(const HamiltonianSystem2D& sys, FlowOptions options) {
  return make_flow<2>([&sys](const Vec2& x) { return sys.shear(x); },
                      [&sys](const Vec2& x) { return Vec<1>(sys.H(x)); },
                      [&sys](const Vec2& x) { return sys.box().contains(x); }, options);
}

struct OrbitOptions {
  double tol = 1e-10;
  /// Flow time after which a trace without return raises NotClosed.
  double max_time = 1e4;
  int min_samples = 64;
  int max_samples = 1 << 17;
};

/// One period of the orbit through `anchor`, sampled uniformly in flow time:
/// points[k] = φ_{kT/N}(anchor), k = 0..N−1.
struct Orbit {
  Vec2 anchor;
  double level = 0.0;
  double period = 0.0;
  std::vector<Vec2> points;
  double energy_error = 0.0;

  std::size_t size() const { return points.size(); }
  double time(std::size_t k) const { return period * static_cast<double>(k) / static_cast<double>(points.size()); }
};

Orbit trace_orbit(const HamiltonianSystem2D& sys, const Vec2& x0, const OrbitOptions& options = {});

/// Period only; cheaper than trace_orbit when samples are not needed.
double orbit_period(const HamiltonianSystem2D& sys, const Vec2& x0, const OrbitOptions& options = {});

/// One loop of the orbit through x0 as a polyline of integrator steps, each
/// subdivided on its Hermite interpolant. Suited to containment tests.
std::vector<Vec2> orbit_loop(const HamiltonianSystem2D& sys, const Vec2& x0, const OrbitOptions& options = {});

/// (1/T)∫₀ᵀ g(φ_t x0) dt by the periodic trapezoid rule.
double orbit_average(const Orbit& orbit, const std::function<double(const Vec2&)>& g);

/// True when the closed polyline winds around p.
bool encloses(const std::vector<Vec2>& loop, const Vec2& p);
inline bool orbit_encloses(const Orbit& orbit, const Vec2& p) { return encloses(orbit.points, p); }

}  // namespace avlab
