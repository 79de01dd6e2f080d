#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "avlab/common/error.hpp"
#include "avlab/common/types.hpp"

namespace avlab {

struct FlowOptions {
  /// Relative conservation tolerance: |I(out) − I(in)| ≤ tol·(1 + |I(in)|)
  /// for every monitored invariant I.
  double tol = 1e-10;
  double min_step = 1e-13;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 10'000'000;
  /// Extra attempts at ten-fold tighter local tolerance when the accumulated
  /// drift over a whole advance() exceeds tol.
  int max_retries = 3;
};

/// One accepted integration step, handed to march() visitors.
template <int N>
struct FlowStep {
  double t0, t1;
  Vec<N> x0, x1;
  Vec<N> v0, v1;
};

/// Cubic Hermite interpolation inside an accepted step, s ∈ [0, 1].
template <int N>
Vec<N> hermite(const FlowStep<N>& s, double theta) {
  const double h = s.t1 - s.t0;
  const double t2 = theta * theta, t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * s.x0 + h10 * h * s.v0 + h01 * s.x1 + h11 * h * s.v1;
}

/// Embedded Dormand–Prince 5(4) integrator for an autonomous field with PI
/// step control. The monitored invariants (energy for planar Hamiltonian
/// flows) enter the error norm, so a step is rejected when it drifts the
/// invariants by more than the local budget.
///
/// Field:     Vec<N>(const Vec<N>&)
/// Invariant: Vec<K>(const Vec<N>&) for some fixed K
/// Domain:    bool(const Vec<N>&), false raises OutOfDomain
template <int N, class Field, class Invariant, class Domain>
class AdaptiveFlow {
 public:
  AdaptiveFlow(Field field, Invariant invariant, Domain domain, FlowOptions options = {})
      : field_(std::move(field)), invariant_(std::move(invariant)), domain_(std::move(domain)), opt_(options) {}

  const FlowOptions& options() const { return opt_; }
  Vec<N> field(const Vec<N>& x) const { return field_(x); }
  auto invariant(const Vec<N>& x) const { return invariant_(x); }

  /// φ_duration(x). Throws StepFailure when the conservation tolerance cannot
  /// be met, OutOfDomain when the trajectory leaves the domain.
  Vec<N> advance(const Vec<N>& x, double duration) const {
    if (duration == 0.0) return x;
    if (!std::isfinite(duration)) throw Error(ErrorKind::InvalidArgument, "non-finite flow duration");
    const auto inv0 = invariant_(x);
    double local_tol = 0.1 * opt_.tol;
    for (int attempt = 0; attempt <= opt_.max_retries; ++attempt) {
      Vec<N> out = x;
      integrate(x, duration, local_tol, [&](const FlowStep<N>& s) {
        out = s.x1;
        return false;
      });
      const auto inv1 = invariant_(out);
      if (drift_ratio(inv0, inv1, opt_.tol) <= 1.0) return out;
      local_tol *= 0.1;
    }
    throw Error(ErrorKind::StepFailure, "invariant drift above tolerance after retries");
  }

  /// Integrates forward from x for at most t_max, calling visit(step) after
  /// every accepted step; visit returns true to stop. Returns the final time.
  template <class Visitor>
  double march(const Vec<N>& x, double t_max, Visitor&& visit) const {
    return integrate(x, t_max, 0.1 * opt_.tol, std::forward<Visitor>(visit));
  }

 private:
  template <class K>
  static double drift_ratio(const K& a, const K& b, double tol) {
    double worst = 0.0;
    for (int k = 0; k < a.size(); ++k)
      worst = std::max(worst, std::abs(b[k] - a[k]) / (tol * (1.0 + std::abs(a[k]))));
    return worst;
  }

  template <class Visitor>
  double integrate(const Vec<N>& x_start, double duration, double tol, Visitor&& visit) const {
    // Dormand–Prince tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2; (void)c3; (void)c4; (void)c5;

    const double dir = duration >= 0 ? 1.0 : -1.0;
    const double span = std::abs(duration);
    Vec<N> x = x_start;
    Vec<N> k1 = field_(x);
    auto inv = invariant_(x);

    double h = initial_step(x, k1, tol, span);
    double t = 0.0;
    double err_prev = 1e-4;
    long steps = 0;

    while (t < span) {
      if (++steps > opt_.max_steps) throw Error(ErrorKind::StepFailure, "step budget exhausted");
      bool last = false;
      if (t + h >= span) {
        h = span - t;
        last = true;
      }
      const double hs = dir * h;
      const Vec<N> k2 = field_(x + hs * (a21 * k1));
      const Vec<N> k3 = field_(x + hs * (a31 * k1 + a32 * k2));
      const Vec<N> k4 = field_(x + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec<N> k5 = field_(x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec<N> k6 = field_(x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec<N> x_new = x + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec<N> k7 = field_(x_new);
      const Vec<N> err_vec = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0.0;
      for (int i = 0; i < N; ++i) {
        const double scale = tol + tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
        err = std::max(err, std::abs(err_vec[i]) / scale);
      }
      const auto inv_new = invariant_(x_new);
      err = std::max(err, drift_ratio(inv, inv_new, tol));
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        const double t_new = last ? span : t + h;
        if (!domain_(x_new)) throw Error(ErrorKind::OutOfDomain, "trajectory left the domain");
        FlowStep<N> rec{dir * t, dir * t_new, x, x_new, k1, k7};
        const bool stop = visit(rec);
        t = t_new;
        x = x_new;
        k1 = k7;
        inv = inv_new;
        if (stop) return dir * t;
        double factor = 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
        if (err == 0.0) factor = 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        err_prev = std::max(err, 1e-4);
        if (!last) h = std::min(h * factor, opt_.max_step);
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h < opt_.min_step) throw Error(ErrorKind::StepFailure, "minimum step size reached");
      }
    }
    return dir * t;
  }

  double initial_step(const Vec<N>& x, const Vec<N>& f, double tol, double span) const {
    const double fx = f.norm();
    const double scale = 1.0 + x.norm();
    double h = fx > 0 ? 0.01 * scale / fx * std::pow(tol / 1e-6, 0.2) : span;
    h = std::min({h, span, opt_.max_step});
    return std::max(h, 10 * opt_.min_step);
  }

  Field field_;
  Invariant invariant_;
  Domain domain_;
  FlowOptions opt_;
};

template <int N, class Field, class Invariant, class Domain>
AdaptiveFlow<N, Field, Invariant, Domain> make_flow(Field f, Invariant i, Domain d, FlowOptions opt = {}) {
  return AdaptiveFlow<N, Field, Invariant, Domain>(std::move(f), std::move(i), std::move(d), opt);
}

}  // namespace avlab
