#include "avlab/book3d/book_simulator.hpp"

#include <algorithm>
#include <cmath>

#include "avlab/book3d/elliptic.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/parallel.hpp"

namespace avlab {

namespace {
constexpr double kBinding = M_PI / 4;
}

BookPoint BookModel::substep(const BookPoint& p, double remaining, double& used, RandomStream& rng,
                             BookObserver* obs) const {
  const double r = p.r;
  const double mu_r = 2.0 / r - w_.dW(r);
  double dt = remaining;
  dt = std::min(dt, params_.radial_cfl * r * r / 2.0);
  dt = std::min(dt, params_.radial_cfl * r / std::abs(mu_r));
  dt = std::min(dt, params_.cfl / w_.d2W(r));

  double lambda = 0.0, mu_t = 0.0;
  const bool angular = !params_.freeze_angle && p.theta > 0.0;
  if (angular) {
    const auto c = angle_coefficients(std::min(p.theta, std::nextafter(kBinding, 0.0)));
    lambda = c.lambda;
    mu_t = lambda * c.b / (r * r);
    const double d = std::min(p.theta, params_.refine_binding ? kBinding - p.theta : kBinding);
    const double s2 = 2.0 * lambda / (r * r);
    if (d > 0.0) {
      dt = std::min(dt, params_.cfl * d * d / s2);
      dt = std::min(dt, params_.cfl * d / std::abs(mu_t));
    }
  } else if (!params_.freeze_angle) {
    lambda = 0.75;
  }
  dt = std::max(dt, std::min(params_.dt_floor, remaining));
  used = dt;

  const double xi_r = rng.normal(), xi_t = rng.normal();
  BookPoint q = p;
  // Crossing the origin in ℝ³ continues on the far side at the same distance.
  q.r = std::abs(r + mu_r * dt + std::sqrt(2.0 * dt) * xi_r);
  if (q.r < params_.r_floor) throw Error(ErrorKind::RadialCollapse, "radius fell below the floor");
  if (params_.freeze_angle) return q;

  // At θ = 0 the drift is singular; the step there is pure diffusion followed by folding.
  q.theta = p.theta + (angular ? mu_t * dt : 0.0) + std::sqrt(2.0 * lambda * dt) / r * xi_t;
  for (int guard = 0; guard < 64; ++guard) {
    if (q.theta < 0.0) {
      q.theta = -q.theta;
    } else if (q.theta >= kBinding) {
      const int to = 1 + static_cast<int>(rng.below(4));
      if (obs) obs->on_binding(q.page, to);
      q.page = to;
      q.theta = 2 * kBinding - q.theta;
    } else {
      return q;
    }
  }
  throw Error(ErrorKind::StepFailure, "angle folding did not settle");
}

BookPoint BookModel::step(BookPoint p, double dt, RandomStream& rng, BookObserver* obs) const {
  double remaining = dt;
  while (remaining > 0.0) {
    double used = 0.0;
    p = substep(p, remaining, used, rng, obs);
    remaining -= used;
    if (remaining < 1e-15 * dt) break;
  }
  return p;
}

Ensemble simulate_book_paths(const BookModel& model, const BookInitLaw& init, const std::vector<double>& times,
                             std::size_t n_paths, double dt, std::uint64_t seed, unsigned threads) {
  Ensemble ens;
  ens.kind = PathKind::Book;
  ens.times = times;
  ens.paths.resize(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    RandomStream init_rng(seed, StreamId::InitialLaw, i);
    RandomStream rng(seed, StreamId::BookPath, i);
    PathRecord& rec = ens.paths[i];
    rec.resize(times.size());
    try {
      BookPoint p = init(init_rng);
      double t = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double span = times[k] - t;
        if (span > 0) {
          const long n = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
          for (long j = 0; j < n; ++j) p = model.step(p, span / n, rng);
          t = times[k];
        }
        rec.label[k] = p.page;
        rec.c1[k] = p.r;
        rec.c2[k] = p.theta;
      }
    } catch (const Error& e) {
      rec.mark(e.kind());
    }
  });
  return ens;
}

AmbientDynamics<3> book_ambient_dynamics(const Confinement& w, double r_max) {
  AmbientDynamics<3> d;
  d.shear = [](const Vec3& x) { return book_shear(x); };
  d.drift = [w](const Vec3& x) { return Vec3(-w.gradient(x)); };
  d.invariants = [](const Vec3& x) { return book_invariants(x); };
  d.domain = [r_max](const Vec3& x) { return x.norm() < r_max; };
  d.level = [](const Vec3& x) { return x.norm(); };
  d.nu = 1.0;
  return d;
}

Ensemble simulate_book_ambient(const Confinement& w, const AmbientConfig& cfg, const AmbientInitLaw<3>& init,
                               const std::vector<double>& times, std::size_t n_paths, std::uint64_t seed,
                               unsigned threads) {
  const AmbientSimulator<3> sim(book_ambient_dynamics(w), cfg);
  return sim.simulate(init, times, n_paths, seed, threads, PathKind::AmbientBook,
                      [](const Vec3& x, std::int32_t& label, double& c1, double& c2) {
                        const BookPoint p = project_book(x);
                        label = p.page;
                        c1 = p.r;
                        c2 = p.theta;
                      });
}

BookInitLaw projected_book_law(const AmbientInitLaw<3>& init) {
  return [init](RandomStream& rng) { return project_book(init(rng)); };
}

}  // namespace avlab
