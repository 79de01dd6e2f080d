#pragma once

#include <cmath>
#include <functional>

#include "avlab/common/types.hpp"

namespace avlab {

/// A point of the four-page book: page i ∈ {1,2,3,4}, polar radius r = ‖y‖
/// and angle θ = arctan(minor/major) ∈ [0, π/4]; θ = π/4 is the binding.
struct BookPoint {
  int page = 1;
  double r = 0.0;
  double theta = 0.0;

  bool binding() const { return theta >= M_PI / 4; }
  /// Coordinates y in the cone of the page.
  Vec2 y() const;
  /// The same point written in page-1 coordinates (major, minor).
  Vec2 canonical() const { return {r * std::cos(theta), r * std::sin(theta)}; }
  static BookPoint from_y(int page, const Vec2& y);
};

/// V(x) = (x₂x₃, x₁x₃, −2x₁x₂).
Vec3 book_shear(const Vec3& x);
/// (‖x‖², x₁² − x₂²), both conserved by the shear.
Vec2 book_invariants(const Vec3& x);

BookPoint project_book(const Vec3& x);

/// Orbit parametrization over the phase ψ ∈ [0, 2π): page 1 is
/// (√(y₁² − y₂² sin²ψ), y₂ cosψ, √2 y₂ sinψ), other pages by the symmetries.
Vec3 orbit_point(const BookPoint& p, double phase);
/// |J| = √2 y₁y₂/x₁ in page-1 coordinates.
double orbit_jacobian(const BookPoint& p, double phase);
/// Closed-form normalizer h(y) = 4√2·minor·K(t).
double orbit_density(const BookPoint& p);

/// Time-uniform orbit average by periodic quadrature in the phase.
double nu_average(const BookPoint& p, const std::function<double(const Vec3&)>& f, double tol = 1e-13);
/// The same quadrature of |J| alone, to compare with orbit_density.
double orbit_density_quadrature(const BookPoint& p, double tol = 1e-13);

/// Averaged diffusion matrix in the page coordinates.
Mat2 book_a_matrix(const BookPoint& p);

/// 2√2 K(t)/major.
double elliptic_period(const BookPoint& p);
/// Return time of the traced ℝ³ orbit through Φ(p, 0).
double traced_period(const BookPoint& p, double tol = 1e-12);

}  // namespace avlab
