#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "avlab/ambient/ambient.hpp"
#include "avlab/book3d/book_geometry.hpp"
#include "avlab/common/ensemble.hpp"
#include "avlab/common/rng.hpp"

namespace avlab {

/// Radial confinement 𝒲(x) = (1 + ‖x‖²)^exponent.
struct Confinement {
  double exponent = 2.5;

  double W(double r) const { return std::pow(1.0 + r * r, exponent); }
  double dW(double r) const { return 2.0 * exponent * r * std::pow(1.0 + r * r, exponent - 1.0); }
  double d2W(double r) const {
    const double u = 1.0 + r * r;
    return 2.0 * exponent * std::pow(u, exponent - 1.0) +
           4.0 * exponent * (exponent - 1.0) * r * r * std::pow(u, exponent - 2.0);
  }
  Vec3 gradient(const Vec3& x) const { return 2.0 * exponent * std::pow(1.0 + x.squaredNorm(), exponent - 1.0) * x; }
};

struct BookStepParams {
  double cfl = 0.5;
  /// Tighter bound for the radial part, where the 2/r drift makes Euler
  /// overshoot toward the origin.
  double radial_cfl = 0.05;
  double dt_floor = 1e-18;
  double r_floor = 1e-8;
  /// Sets λ ≡ 0, leaving only the radial motion.
  bool freeze_angle = false;
  /// Also shrink steps by the distance to the binding, not only to θ = 0.
  bool refine_binding = false;
};

class BookObserver {
 public:
  virtual ~BookObserver() = default;
  virtual void on_binding(int from_page, int to_page) = 0;
};

/// Euler–Maruyama for dr = (2/r − W′)dt + √2 dB and
/// dθ = (λ_θ/r²) b_θ dt + √(2λ_θ)/r dB′, folded at θ = 0 and redistributed
/// uniformly over the pages at θ = π/4.
class BookModel {
 public:
  explicit BookModel(Confinement w = {}, BookStepParams params = {}) : w_(w), params_(params) {}

  const Confinement& confinement() const { return w_; }
  const BookStepParams& params() const { return params_; }

  BookPoint step(BookPoint p, double dt, RandomStream& rng, BookObserver* obs = nullptr) const;

 private:
  BookPoint substep(const BookPoint& p, double remaining, double& used, RandomStream& rng, BookObserver* obs) const;

  Confinement w_;
  BookStepParams params_;
};

using BookInitLaw = std::function<BookPoint(RandomStream&)>;

/// Label = page, (c1, c2) = (r, θ). Streams as in the graph simulator with the
/// BookPath stream for the dynamics.
Ensemble simulate_book_paths(const BookModel& model, const BookInitLaw& init, const std::vector<double>& times,
                             std::size_t n_paths, double dt, std::uint64_t seed, unsigned threads = 1);

/// dX = κV dt − ∇𝒲 dt + √2 dB in ℝ³, stopped outside the ball of radius r_max.
AmbientDynamics<3> book_ambient_dynamics(const Confinement& w, double r_max = 6.0);

/// Ambient ℝ³ paths observed through the book projection.
Ensemble simulate_book_ambient(const Confinement& w, const AmbientConfig& cfg, const AmbientInitLaw<3>& init,
                               const std::vector<double>& times, std::size_t n_paths, std::uint64_t seed,
                               unsigned threads = 1);

/// The pushforward of an ℝ³ law under the projection, drawing from the same
/// initial stream as the ambient simulation.
BookInitLaw projected_book_law(const AmbientInitLaw<3>& init);

}  // namespace avlab
