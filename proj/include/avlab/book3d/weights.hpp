#pragma once

#include <cmath>
#include <vector>

#include "avlab/coeffs/edge_table.hpp"
#include "avlab/common/types.hpp"

namespace avlab {

/// The angular change of variable φ(t) = c∫_t^1 du/((1+u²)√λ(u)) with
/// c = π/(2∫_0^1 du/((1+u²)√λ(u))), and the weight
/// k(φ) = 4√2 t K(t)√λ(t)/(c√(1+t²)) at t = φ⁻¹(φ).
class AngularWeight {
 public:
  struct Node {
    double t, gap;  // gap = 1 − t
    double phi, k;
  };

  explicit AngularWeight(int nodes_per_decade = 4);

  double c() const { return c_; }
  double integral() const { return integral_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  /// k at φ ∈ (0, π/2]; below the table it follows the √|log φ| asymptote.
  double k(double phi) const;

 private:
  double c_ = 0, integral_ = 0;
  std::vector<Node> nodes_;
  MonotoneCubic k_of_logphi_;
  double log_phi_min_ = 0, k_min_phi_ = 0;
};

struct SlopeFit {
  double slope = 0, intercept = 0, r2 = 0;
  std::size_t points = 0;
};

SlopeFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// C(z, ρ) = (1/π²ρ⁴)∫_B ω ∫_B ω⁻¹ over the ball B(z, ρ) for ω(z) = |z|·k_n(arg z),
/// with k_n frozen at φ = π/2 − 1/n beyond it and extended evenly to [−π, π].
double a2_functional(const AngularWeight& w, int n, const Vec2& z, double rho, double tol = 1e-9);

struct A2Grid {
  int angles = 16;
  int radii = 16;
  double rho_min = 1e-3, rho_max = 1e2;
  double tol = 1e-8;
};

struct A2Estimate {
  double sup = 0, at_origin = 0;
  double argmax_angle = 0, argmax_rho = 0;
};

/// Max of C over z = 0 and |z| = 1 with arg z ∈ [0, π]; scale invariance
/// covers the other balls.
A2Estimate a2_supremum(const AngularWeight& w, int n, const A2Grid& grid);

struct WeightReport {
  double c = 0;
  SlopeFit right_end;  // k against π/2 − φ near φ = π/2
  double right_expected = 0;
  SlopeFit left_end;   // k against |log φ|^{1/2} near φ = 0
  double left_expected = 0;
  /// Ratio of k's prefactor 4√2 t K√λ/(c√(1+t²)) to the bare forms
  /// 3π/(8c²) and 1/(2c) of the two asymptotes.
  static constexpr double kPrefactor = 4 * M_SQRT2;
  double lambda_h_near_binding = 0;
  int a2_truncation = 0;
  A2Estimate a2, a2_refined;
};

WeightReport weight_validations(int a2_truncation = 8, const A2Grid& grid = {});

}  // namespace avlab
