#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "avlab/common/ensemble.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/common/rng.hpp"
#include "avlab/common/types.hpp"
#include "avlab/fields/flow.hpp"
#include "avlab/fields/hamiltonian.hpp"
#include "avlab/reeb/metric_graph.hpp"

namespace avlab {

/// Ambient diffusion dX = κV(X)dt + drift(X)dt + √(2ν) dB, with V preserving
/// the monitored invariants and `level` the slow observable used for
/// truncation.
template <int N>
struct AmbientDynamics {
  std::function<Vec<N>(const Vec<N>&)> shear;
  std::function<Vec<N>(const Vec<N>&)> drift;
  std::function<Vec2(const Vec<N>&)> invariants;
  std::function<bool(const Vec<N>&)> domain;
  std::function<double(const Vec<N>&)> level;
  double nu = 0.5;
};

struct AmbientConfig {
  double kappa = 0.0;
  double dt = 1e-3;
  double flow_tol = 1e-9;
  /// Paths whose level exceeds this are flagged, matching the graph truncation.
  double h_max = std::numeric_limits<double>::infinity();
};

AmbientDynamics<2> planar_dynamics(const HamiltonianSystem2D& sys);

template <int N>
using AmbientInitLaw = std::function<Vec<N>(RandomStream&)>;

AmbientInitLaw<2> annulus_law(const Vec2& center, double r_in, double r_out);

template <int N>
AmbientInitLaw<N> point_law(const Vec<N>& x) {
  return [x](RandomStream&) { return x; };
}

/// Gaussian N(mean, sd²I) conditioned on |x − mean| ≤ radius.
template <int N>
AmbientInitLaw<N> truncated_gaussian_law(const Vec<N>& mean, double sd, double radius) {
  return [=](RandomStream& rng) {
    for (;;) {
      Vec<N> z;
      for (int i = 0; i < N; ++i) z[i] = rng.normal();
      if (sd * z.norm() <= radius) return Vec<N>(mean + sd * z);
    }
  };
}

/// Strang splitting: half diffusion step, exact shear flow over κ·dt, half
/// diffusion step.
template <int N>
class AmbientSimulator {
 public:
  AmbientSimulator(AmbientDynamics<N> dynamics, AmbientConfig config)
      : dyn_(std::make_shared<const AmbientDynamics<N>>(std::move(dynamics))), cfg_(config) {}

  const AmbientConfig& config() const { return cfg_; }
  const AmbientDynamics<N>& dynamics() const { return *dyn_; }

  /// x + drift(x)·τ + noise: the diffusion half of the splitting.
  Vec<N> diffuse(const Vec<N>& x, double tau, const Vec<N>& noise) const { return x + dyn_->drift(x) * tau + noise; }

  /// φ_{κ·dt}(x).
  Vec<N> shear_flow(const Vec<N>& x, double dt) const {
    if (cfg_.kappa == 0.0 || dt == 0.0) return x;
    FlowOptions opt;
    opt.tol = cfg_.flow_tol;
    const auto d = dyn_;
    const auto flow = make_flow<N>([d](const Vec<N>& p) { return d->shear(p); },
                                   [d](const Vec<N>& p) { return d->invariants(p); },
                                   [d](const Vec<N>& p) { return d->domain(p); }, opt);
    return flow.advance(x, cfg_.kappa * dt);
  }

  Vec<N> step(const Vec<N>& x, double dt, RandomStream& rng) const {
    const double half = 0.5 * dt;
    const double scale = std::sqrt(2.0 * dyn_->nu * half);
    Vec<N> y = diffuse(x, half, gaussian(rng) * scale);
    y = shear_flow(y, dt);
    y = diffuse(y, half, gaussian(rng) * scale);
    if (!dyn_->domain(y)) throw Error(ErrorKind::OutOfDomain, "ambient path left the domain");
    return y;
  }

  /// Advances from x over `span` in equal steps no longer than dt, checking
  /// the truncation level after every step.
  Vec<N> advance(Vec<N> x, double span, RandomStream& rng) const {
    if (span <= 0) return x;
    const long n = std::max(1L, static_cast<long>(std::ceil(span / cfg_.dt - 1e-9)));
    for (long j = 0; j < n; ++j) {
      x = step(x, span / n, rng);
      if (dyn_->level(x) > cfg_.h_max) throw Error(ErrorKind::CoefficientRangeExceeded, "level above truncation");
    }
    return x;
  }

  /// Path i uses streams (seed, InitialLaw, i) and (seed, AmbientPath, i).
  /// `observe` maps a point to (label, c1, c2) at each observation time.
  template <class Observe>
  Ensemble simulate(const AmbientInitLaw<N>& init, const std::vector<double>& times, std::size_t n_paths,
                    std::uint64_t seed, unsigned threads, PathKind kind, const Observe& observe) const {
    Ensemble ens;
    ens.kind = kind;
    ens.times = times;
    ens.paths.resize(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
      RandomStream init_rng(seed, StreamId::InitialLaw, i);
      RandomStream rng(seed, StreamId::AmbientPath, i);
      PathRecord& rec = ens.paths[i];
      rec.resize(times.size());
      try {
        Vec<N> x = init(init_rng);
        double t = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
          x = advance(x, times[k] - t, rng);
          t = std::max(t, times[k]);
          observe(x, rec.label[k], rec.c1[k], rec.c2[k]);
        }
      } catch (const Error& e) {
        rec.mark(e.kind());
      }
    });
    return ens;
  }

 private:
  static Vec<N> gaussian(RandomStream& rng) {
    Vec<N> z;
    for (int i = 0; i < N; ++i) z[i] = rng.normal();
    return z;
  }

  std::shared_ptr<const AmbientDynamics<N>> dyn_;
  AmbientConfig cfg_;
};

/// Single ambient step (the spec-level entry point).
Vec2 ambient_step(const HamiltonianSystem2D& sys, const AmbientConfig& cfg, const Vec2& x, double dt, RandomStream& rng);

/// Ambient paths observed through π at the grid times only.
Ensemble simulate_projected(const HamiltonianSystem2D& sys, const Projection& proj, const AmbientConfig& cfg,
                            const AmbientInitLaw<2>& init, const std::vector<double>& times, std::size_t n_paths,
                            std::uint64_t seed, unsigned threads = 1);

/// Encodes a graph location as (label, c1): edge id, or −1 − vertex id.
inline void encode_location(const GraphLocation& loc, std::int32_t& label, double& c1) {
  label = loc.on_vertex() ? -1 - loc.vertex : loc.edge;
  c1 = loc.h;
}

}  // namespace avlab
