#include "avlab/book3d/book_geometry.hpp"

#include <cmath>

#include "avlab/book3d/elliptic.hpp"
#include "avlab/common/error.hpp"
#include "avlab/fields/return_time.hpp"

namespace avlab {

namespace {

void require_interior(const BookPoint& p) {
  if (p.binding()) throw Error(ErrorKind::BindingPoint, "orbit average undefined on the binding");
  if (!(p.r > 0.0 && p.theta > 0.0)) throw Error(ErrorKind::InvalidArgument, "point on the stationary set");
  if (p.page < 1 || p.page > 4) throw Error(ErrorKind::InvalidArgument, "page outside 1..4");
}

double modulus_complement(const BookPoint& p) {
  return std::sqrt(std::sin(2.0 * (M_PI / 4 - p.theta))) / std::cos(p.theta);
}

template <class F>
double kahan_sum(F&& g, int n, double offset) {
  double sum = 0.0, carry = 0.0;
  for (int k = 0; k < n; ++k) {
    const double y = g(2 * M_PI * (k + offset) / n) - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

template <class F>
double periodic_trapezoid(F&& g, double tol) {
  int n = 64;
  double prev = kahan_sum(g, n, 0.0) * 2 * M_PI / n;
  while (n < (1 << 23)) {
    const double next = 0.5 * prev + M_PI * kahan_sum(g, n, 0.5) / n;
    n *= 2;
    if (std::abs(next - prev) <= tol * (1.0 + std::abs(next))) return next;
    prev = next;
  }
  throw Error(ErrorKind::StepFailure, "orbit quadrature did not converge");
}

}  // namespace

Vec2 BookPoint::y() const {
  const double major = r * std::cos(theta), minor = r * std::sin(theta);
  switch (page) {
    case 1: return {major, minor};
    case 2: return {minor, major};
    case 3: return {-major, -minor};
    case 4: return {-minor, -major};
  }
  throw Error(ErrorKind::InvalidArgument, "page outside 1..4");
}

BookPoint BookPoint::from_y(int page, const Vec2& y) {
  const double a = std::abs(y[0]), b = std::abs(y[1]);
  BookPoint p;
  p.page = page;
  p.r = std::hypot(a, b);
  p.theta = std::atan2(std::min(a, b), std::max(a, b));
  if (a == b) p.theta = M_PI / 4;
  return p;
}

Vec3 book_shear(const Vec3& x) { return {x[1] * x[2], x[0] * x[2], -2.0 * x[0] * x[1]}; }

Vec2 book_invariants(const Vec3& x) { return {x.squaredNorm(), x[0] * x[0] - x[1] * x[1]}; }

BookPoint project_book(const Vec3& x) {
  const double half3 = 0.5 * x[2] * x[2];
  const double a = std::sqrt(x[0] * x[0] + half3), b = std::sqrt(x[1] * x[1] + half3);
  const bool upper = x[0] + x[1] >= 0.0;
  const bool first = std::abs(x[0]) >= std::abs(x[1]);
  const int page = upper ? (first ? 1 : 2) : (first ? 3 : 4);
  return BookPoint::from_y(page, upper ? Vec2(a, b) : Vec2(-a, -b));
}

/// y₁² − y₂² sin²ψ written as r² cos 2θ + y₂² cos²ψ, free of cancellation near the binding.
static double major_coordinate(const BookPoint& p, double minor, double phase) {
  const double c = std::cos(phase);
  return std::sqrt(p.r * p.r * std::sin(2.0 * (M_PI / 4 - p.theta)) + minor * minor * c * c);
}

Vec3 orbit_point(const BookPoint& p, double phase) {
  const Vec2 c = p.canonical();
  const double s = std::sin(phase);
  Vec3 x(major_coordinate(p, c[1], phase), c[1] * std::cos(phase), M_SQRT2 * c[1] * s);
  if (p.page == 2 || p.page == 4) std::swap(x[0], x[1]);
  if (p.page == 3 || p.page == 4) {
    x[0] = -x[0];
    x[1] = -x[1];
  }
  return x;
}

double orbit_jacobian(const BookPoint& p, double phase) {
  const Vec2 c = p.canonical();
  return M_SQRT2 * c[0] * c[1] / major_coordinate(p, c[1], phase);
}

double orbit_density(const BookPoint& p) {
  require_interior(p);
  const double t = std::tan(p.theta);
  return 4.0 * M_SQRT2 * p.r * std::sin(p.theta) * complete_elliptic(t, modulus_complement(p)).K;
}

double nu_average(const BookPoint& p, const std::function<double(const Vec3&)>& f, double tol) {
  const double h = orbit_density(p);
  return periodic_trapezoid([&](double s) { return f(orbit_point(p, s)) * orbit_jacobian(p, s); }, tol) / h;
}

double orbit_density_quadrature(const BookPoint& p, double tol) {
  require_interior(p);
  return periodic_trapezoid([&](double s) { return orbit_jacobian(p, s); }, tol);
}

Mat2 book_a_matrix(const BookPoint& p) {
  const double x3sq = nu_average(p, [](const Vec3& x) { return x[2] * x[2]; });
  const Vec2 y = p.y();
  Mat2 a;
  a(0, 0) = 1.0 - x3sq / (4.0 * y[0] * y[0]);
  a(1, 1) = 1.0 - x3sq / (4.0 * y[1] * y[1]);
  a(0, 1) = a(1, 0) = x3sq / (4.0 * y[0] * y[1]);
  return a;
}

double elliptic_period(const BookPoint& p) {
  require_interior(p);
  const double t = std::tan(p.theta);
  return 2.0 * M_SQRT2 * complete_elliptic(t, modulus_complement(p)).K / (p.r * std::cos(p.theta));
}

double traced_period(const BookPoint& p, double tol) {
  require_interior(p);
  FlowOptions opt;
  opt.tol = tol;
  const auto flow = make_flow<3>([](const Vec3& x) { return book_shear(x); },
                                 [](const Vec3& x) { return book_invariants(x); }, [](const Vec3&) { return true; },
                                 opt);
  return find_period<3>(flow, orbit_point(p, 0.0), 20.0 * elliptic_period(p));
}

}  // namespace avlab
