#pragma once

#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <cstdint>

#include "avlab/common/error.hpp"
#include "avlab/fields/flow.hpp"

namespace avlab {

template <int N>
struct FlowReturn {
  FlowStep<N> step;
  double theta;
};

/// First return of the flow to the section through x0 normal to the flow
/// direction, accepted only near x0. `collect` sees every accepted step up to
/// and including the returning one.
template <int N, class Flow, class Collect>
FlowReturn<N> find_return(const Flow& flow, const Vec<N>& x0, double max_time, Collect&& collect) {
  const Vec<N> v0 = flow.field(x0);
  const auto section = [&](const Vec<N>& x) { return (x - x0).dot(v0); };
  double d_max = 0.0;
  bool found = false;
  FlowReturn<N> hit{};
  try {
    flow.march(x0, max_time, [&](const FlowStep<N>& s) {
      collect(s);
      d_max = std::max(d_max, (s.x1 - x0).norm());
      const double s0 = section(s.x0), s1 = section(s.x1);
      if (!(s0 < 0.0 && s1 >= 0.0) || s.v1.dot(v0) <= 0.0) return false;
      // Locate the crossing on the Hermite interpolant before judging proximity.
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (section(hermite(s, mid)) < 0.0 ? lo : hi) = mid;
      }
      if ((hermite(s, hi) - x0).norm() > 1e-3 * d_max) return false;
      hit = {s, hi};
      found = true;
      return true;
    });
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::OutOfDomain) throw Error(ErrorKind::NotClosed, "orbit leaves the domain");
    if (e.kind() == ErrorKind::StepFailure) throw Error(ErrorKind::NotClosed, "orbit integration stalled");
    throw;
  }
  if (!found) throw Error(ErrorKind::NotClosed, "no return to the section within the flow-time budget");
  return hit;
}

/// Return time polished by root finding on the integrator itself.
template <int N, class Flow>
double find_period(const Flow& flow, const Vec<N>& x0, double max_time) {
  const Vec<N> v0 = flow.field(x0);
  const auto section = [&](const Vec<N>& x) { return (x - x0).dot(v0); };
  const FlowStep<N> hit = find_return<N>(flow, x0, max_time, [](const FlowStep<N>&) {}).step;
  const double h = hit.t1 - hit.t0;
  const auto f = [&](double tau) { return section(flow.advance(hit.x0, tau)); };
  std::uintmax_t iters = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, h, section(hit.x0), section(hit.x1),
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
  return hit.t0 + 0.5 * (a + b);
}

}  // namespace avlab
