#include "avlab/fields/orbit.hpp"

#include <cmath>
#include <cstdint>

#include "avlab/common/error.hpp"
#include "avlab/fields/return_time.hpp"

namespace avlab {

Vec2 flow_step(const HamiltonianSystem2D& sys, const Vec2& x, double dt, double tol) {
  if (!std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "non-finite dt");
  if (!sys.box().contains(x)) throw Error(ErrorKind::OutOfDomain, "start point outside the domain box");
  if (dt == 0.0) return x;
  FlowOptions opt;
  opt.tol = tol;
  return planar_flow(sys, opt).advance(x, dt);
}

namespace {

void check_anchor(const HamiltonianSystem2D& sys, const Vec2& x0) {
  if (!sys.box().contains(x0)) throw Error(ErrorKind::OutOfDomain, "anchor outside the domain box");
  if (sys.grad_H(x0).norm() < sys.near_critical_threshold(x0))
    throw Error(ErrorKind::NearCritical, "gradient vanishes at the anchor");
}

FlowOptions flow_options(const OrbitOptions& options) {
  FlowOptions opt;
  opt.tol = options.tol;
  return opt;
}

}  // namespace

double orbit_period(const HamiltonianSystem2D& sys, const Vec2& x0, const OrbitOptions& options) {
  check_anchor(sys, x0);
  return find_period<2>(planar_flow(sys, flow_options(options)), x0, options.max_time);
}

Orbit trace_orbit(const HamiltonianSystem2D& sys, const Vec2& x0, const OrbitOptions& options) {
  check_anchor(sys, x0);
  const auto flow = planar_flow(sys, flow_options(options));
  Orbit orbit;
  orbit.anchor = x0;
  orbit.level = sys.H(x0);
  orbit.period = find_period<2>(flow, x0, options.max_time);

  const double T = orbit.period;
  int n = std::max(4, options.min_samples);
  orbit.points.resize(n);
  orbit.points[0] = x0;
  for (int k = 1; k < n; ++k) orbit.points[k] = flow.advance(orbit.points[k - 1], T / n);

  // Probe averages: coordinates and |∇H|² carry the geometry the callers need.
  const auto probes = [&](const std::vector<Vec2>& pts, int stride) {
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    int count = 0;
    for (std::size_t k = 0; k < pts.size(); k += stride, ++count)
      acc += Eigen::Vector3d(pts[k][0], pts[k][1], sys.grad_H(pts[k]).squaredNorm());
    return Eigen::Vector3d(acc / count);
  };
  double extent = 0.0;
  for (const auto& p : orbit.points) extent = std::max(extent, (p - x0).norm());

  while (n < options.max_samples) {
    std::vector<Vec2> refined(2 * n);
    for (int k = 0; k < n; ++k) {
      refined[2 * k] = orbit.points[k];
      refined[2 * k + 1] = flow.advance(orbit.points[k], T / (2 * n));
    }
    orbit.points = std::move(refined);
    n *= 2;
    const Eigen::Vector3d fine = probes(orbit.points, 1), coarse = probes(orbit.points, 2);
    const double scale_x = extent + std::abs(x0[0]) + std::abs(x0[1]) + 1e-300;
    const bool converged = std::abs(fine[0] - coarse[0]) <= options.tol * scale_x &&
                           std::abs(fine[1] - coarse[1]) <= options.tol * scale_x &&
                           std::abs(fine[2] - coarse[2]) <= options.tol * std::abs(fine[2]);
    if (converged) break;
  }

  for (const auto& p : orbit.points)
    orbit.energy_error = std::max(orbit.energy_error, std::abs(sys.H(p) - orbit.level));
  return orbit;
}

std::vector<Vec2> orbit_loop(const HamiltonianSystem2D& sys, const Vec2& x0, const OrbitOptions& options) {
  check_anchor(sys, x0);
  constexpr int kSub = 4;
  std::vector<Vec2> loop;
  const FlowReturn<2> r = find_return<2>(planar_flow(sys, flow_options(options)), x0, options.max_time, [&](const FlowStep<2>& s) {
    for (int j = 0; j < kSub; ++j) loop.push_back(hermite(s, static_cast<double>(j) / kSub));
  });
  // The last step overshoots the section; keep only its part before the return.
  loop.resize(loop.size() - kSub);
  for (int j = 0; j < kSub; ++j) loop.push_back(hermite(r.step, r.theta * j / kSub));
  return loop;
}

double orbit_average(const Orbit& orbit, const std::function<double(const Vec2&)>& g) {
  if (orbit.points.empty()) throw Error(ErrorKind::InvalidArgument, "empty orbit");
  double sum = 0.0, comp = 0.0;
  for (const auto& p : orbit.points) {
    const double y = g(p) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(orbit.points.size());
}

bool encloses(const std::vector<Vec2>& loop, const Vec2& p) {
  double winding = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = loop[k] - p, b = loop[(k + 1) % n] - p;
    winding += std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b));
  }
  return std::abs(winding) > M_PI;
}

}  // namespace avlab
