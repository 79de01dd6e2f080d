#include "avlab/fields/hamiltonian.hpp"

#include "avlab/common/error.hpp"

namespace avlab {

ExpressionField::ExpressionField(std::string_view text)
    : f_(Expression::parse(text)),
      d1_(f_.derivative(0)),
      d2_(f_.derivative(1)),
      d11_(d1_.derivative(0)),
      d12_(d1_.derivative(1)),
      d22_(d2_.derivative(1)) {}

Mat2 ExpressionField::hessian(const Vec2& x) const {
  Mat2 m;
  const double off = d12_.evaluate(x);
  m << d11_.evaluate(x), off, off, d22_.evaluate(x);
  return m;
}

double DuffingWell::value(const Vec2& x) const {
  const double u = x[0] * x[0] - 1.0;
  return 0.25 * u * u + 0.5 * x[1] * x[1];
}

Vec2 DuffingWell::gradient(const Vec2& x) const {
  return {x[0] * (x[0] * x[0] - 1.0), x[1]};
}

Mat2 DuffingWell::hessian(const Vec2& x) const {
  Mat2 m;
  m << 3.0 * x[0] * x[0] - 1.0, 0.0, 0.0, 1.0;
  return m;
}

HamiltonianSystem2D::HamiltonianSystem2D(std::shared_ptr<const ScalarField2D> hamiltonian,
                                         std::shared_ptr<const VectorField2D> drift, double nu, Box box,
                                         std::string name)
    : h_(std::move(hamiltonian)), drift_(std::move(drift)), nu_(nu), box_(box), name_(std::move(name)) {
  if (!h_) throw Error(ErrorKind::InvalidArgument, "missing Hamiltonian");
  if (!drift_) drift_ = std::make_shared<ZeroField>();
  if (!(nu_ >= 0.0)) throw Error(ErrorKind::InvalidArgument, "diffusivity must be non-negative");
  if (!(box_.hi[0] > box_.lo[0] && box_.hi[1] > box_.lo[1]))
    throw Error(ErrorKind::InvalidArgument, "empty domain box");
}

double HamiltonianSystem2D::near_critical_threshold(const Vec2& x) const {
  const double hess_norm = h_->hessian(x).norm();
  return 1e-8 * (1.0 + hess_norm * box_.diameter());
}

std::shared_ptr<const ScalarField2D> make_hamiltonian(std::string_view name_or_expression) {
  if (name_or_expression == "radial-quadratic") return std::make_shared<RadialQuadratic>();
  if (name_or_expression == "duffing-well") return std::make_shared<DuffingWell>();
  return std::make_shared<ExpressionField>(name_or_expression);
}

}  // namespace avlab
