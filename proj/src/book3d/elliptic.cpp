#include "avlab/book3d/elliptic.hpp"

#include <cmath>

#include "avlab/common/error.hpp"

namespace avlab {

EllipticIntegrals complete_elliptic(double t, double tc) {
  if (!(t >= 0.0 && tc > 0.0)) throw Error(ErrorKind::InvalidArgument, "elliptic modulus outside [0, 1)");
  // AGM with the gaps a − b and the c-sequence rescaled by t.
  double a = 1.0, b = tc;
  double gap_over_t = t / (1.0 + tc);  // (a − b)/t
  double sum = 0.5;                    // Σ 2^{n−1} (c_n/t)²
  double weight = 0.5;
  for (int n = 0; n < 64; ++n) {
    const double c_over_t = 0.5 * gap_over_t;
    weight *= 2.0;
    sum += weight * c_over_t * c_over_t;
    const double sa = std::sqrt(a), sb = std::sqrt(b);
    const double a_next = 0.5 * (a + b), b_next = sa * sb;
    gap_over_t = t * gap_over_t * gap_over_t / (2.0 * (sa + sb) * (sa + sb));
    a = a_next;
    b = b_next;
    if (weight * c_over_t * c_over_t <= 1e-17 * sum && std::abs(a - b) <= 1e-16 * a) break;
  }
  EllipticIntegrals r;
  r.K = M_PI / (2.0 * a);
  r.D = r.K * sum;
  r.E = r.K - t * t * r.D;
  return r;
}

EllipticIntegrals complete_elliptic(double t) { return complete_elliptic(t, std::sqrt((1.0 - t) * (1.0 + t))); }

BookCoefficients book_coefficients(double t, double tc) {
  const auto ke = complete_elliptic(t, tc);
  BookCoefficients c;
  c.K = ke.K;
  c.E = ke.E;
  c.q = ke.D / ke.K;
  c.alpha = t * t * c.q;
  if (t < 1e-2) {
    const double t2 = t * t;
    c.dq = t * (0.125 + t2 * (0.125 + t2 * 123.0 / 1024.0));
  } else {
    c.dq = (ke.E * (ke.K - ke.D) / (tc * tc) - ke.D * ke.K) / (t * ke.K * ke.K);
  }
  c.lambda = 1.0 - 0.5 * (1.0 + t * t) * c.q;
  c.dlambda = -t * c.q - 0.5 * (1.0 + t * t) * c.dq;
  return c;
}

BookCoefficients book_coefficients(double t) { return book_coefficients(t, std::sqrt((1.0 - t) * (1.0 + t))); }

double lambda_of(double t) { return book_coefficients(t).lambda; }

AngleCoefficients angle_coefficients(double theta) {
  if (!(theta > 0.0 && theta < M_PI / 4)) throw Error(ErrorKind::InvalidArgument, "book angle outside (0, π/4)");
  const double t = std::tan(theta);
  // 1 − tan²θ = cos 2θ / cos²θ, with cos 2θ taken from the distance to π/4.
  const double tc = std::sqrt(std::sin(2.0 * (M_PI / 4 - theta))) / std::cos(theta);
  const auto c = book_coefficients(t, tc);
  AngleCoefficients a;
  a.lambda = c.lambda;
  a.h = 4.0 * M_SQRT2 * c.K * std::sin(theta);
  const double dlogK = t * (1.0 - c.q) / (tc * tc);
  a.b = (1.0 + t * t) * (c.dlambda / c.lambda + dlogK) + 1.0 / std::tan(theta);
  return a;
}

}  // namespace avlab
