#pragma once

namespace avlab {

/// Complete elliptic integrals K and E of modulus t, with D = (K − E)/t²
/// carried separately so that ratios near t = 0 keep full precision.
struct EllipticIntegrals {
  double K = 0, E = 0, D = 0;
};

/// `tc` is the complementary modulus √(1 − t²); passing it avoids the
/// cancellation in 1 − t² near t = 1.
EllipticIntegrals complete_elliptic(double t, double tc);
EllipticIntegrals complete_elliptic(double t);

/// Angular coefficients of the book generator at modulus t = tanθ.
struct BookCoefficients {
  double K = 0, E = 0;
  double alpha = 0;   // 1 − E/K
  double q = 0;       // α/t²
  double dq = 0;      // dq/dt
  double lambda = 0;  // 1 − (1 + t²)α/(2t²)
  double dlambda = 0;
};

BookCoefficients book_coefficients(double t, double tc);
BookCoefficients book_coefficients(double t);

double lambda_of(double t);

/// Functions of the book angle θ ∈ (0, π/4) with t = tanθ.
struct AngleCoefficients {
  double lambda = 0;  // λ(tanθ)
  double h = 0;       // 4√2 K(tanθ) sinθ
  double b = 0;       // d/dθ log(λh)
};

AngleCoefficients angle_coefficients(double theta);

}  // namespace avlab
