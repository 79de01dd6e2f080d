#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "avlab/common/types.hpp"
#include "avlab/fields/expression.hpp"

namespace avlab {

/// C² scalar field on the plane with analytic first and second derivatives.
class ScalarField2D {
 public:
  virtual ~ScalarField2D() = default;
  virtual double value(const Vec2& x) const = 0;
  virtual Vec2 gradient(const Vec2& x) const = 0;
  virtual Mat2 hessian(const Vec2& x) const = 0;
};

/// C¹ vector field on the plane.
class VectorField2D {
 public:
  virtual ~VectorField2D() = default;
  virtual Vec2 value(const Vec2& x) const = 0;
};

/// Scalar field backed by a parsed expression and its symbolic derivatives.
class ExpressionField final : public ScalarField2D {
 public:
  explicit ExpressionField(std::string_view text);

  double value(const Vec2& x) const override { return f_.evaluate(x); }
  Vec2 gradient(const Vec2& x) const override { return {d1_.evaluate(x), d2_.evaluate(x)}; }
  Mat2 hessian(const Vec2& x) const override;

 private:
  Expression f_, d1_, d2_, d11_, d12_, d22_;
};

/// H = ½|x|².
class RadialQuadratic final : public ScalarField2D {
 public:
  double value(const Vec2& x) const override { return 0.5 * x.squaredNorm(); }
  Vec2 gradient(const Vec2& x) const override { return x; }
  Mat2 hessian(const Vec2&) const override { return Mat2::Identity(); }
};

/// H = (x1² − 1)²/4 + x2²/2: two wells at (±1, 0) joined by a saddle at the origin.
class DuffingWell final : public ScalarField2D {
 public:
  double value(const Vec2& x) const override;
  Vec2 gradient(const Vec2& x) const override;
  Mat2 hessian(const Vec2& x) const override;
};

class ZeroField final : public VectorField2D {
 public:
  Vec2 value(const Vec2&) const override { return Vec2::Zero(); }
};

/// V0(x) = −rate · x.
class LinearRestoring final : public VectorField2D {
 public:
  explicit LinearRestoring(double rate) : rate_(rate) {}
  Vec2 value(const Vec2& x) const override { return -rate_ * x; }

 private:
  double rate_;
};

/// V0 given component-wise by two expressions.
class ExpressionVectorField final : public VectorField2D {
 public:
  ExpressionVectorField(std::string_view first, std::string_view second)
      : first_(Expression::parse(first)), second_(Expression::parse(second)) {}
  Vec2 value(const Vec2& x) const override { return {first_.evaluate(x), second_.evaluate(x)}; }

 private:
  Expression first_, second_;
};

struct Box {
  Vec2 lo{-1.0, -1.0};
  Vec2 hi{1.0, 1.0};

  bool contains(const Vec2& x) const {
    return x[0] >= lo[0] && x[0] <= hi[0] && x[1] >= lo[1] && x[1] <= hi[1];
  }
  double diameter() const { return (hi - lo).norm(); }
  double area() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]); }
};

/// The ambient planar model: Hamiltonian H with shear field V = (−∂₂H, ∂₁H),
/// perturbation drift V0, and isotropic diffusivity nu (generator
/// νΔ + V0·∇, carré du champ Γ(f, f) = ν|∇f|²). Immutable after construction.
class HamiltonianSystem2D {
 public:
  HamiltonianSystem2D(std::shared_ptr<const ScalarField2D> hamiltonian,
                      std::shared_ptr<const VectorField2D> drift, double nu, Box box,
                      std::string name = "custom");

  double H(const Vec2& x) const { return h_->value(x); }
  Vec2 grad_H(const Vec2& x) const { return h_->gradient(x); }
  Mat2 hess_H(const Vec2& x) const { return h_->hessian(x); }
  Vec2 shear(const Vec2& x) const {
    const Vec2 g = h_->gradient(x);
    return {-g[1], g[0]};
  }
  Vec2 drift(const Vec2& x) const { return drift_->value(x); }
  double nu() const { return nu_; }
  const Box& box() const { return box_; }
  const std::string& name() const { return name_; }

  /// Below this gradient norm an orbit is treated as critical.
  double near_critical_threshold(const Vec2& x) const;

 private:
  std::shared_ptr<const ScalarField2D> h_;
  std::shared_ptr<const VectorField2D> drift_;
  double nu_;
  Box box_;
  std::string name_;
};

/// Builds a Hamiltonian from a preset name ("radial-quadratic",
/// "duffing-well") or, failing that, parses `name_or_expression` as an
/// expression in x1, x2.
std::shared_ptr<const ScalarField2D> make_hamiltonian(std::string_view name_or_expression);

}  // namespace avlab
