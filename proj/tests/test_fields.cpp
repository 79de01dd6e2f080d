#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "avlab/common/error.hpp"
#include "avlab/fields/expression.hpp"
#include "avlab/fields/hamiltonian.hpp"
#include "avlab/fields/orbit.hpp"

using namespace avlab;

namespace {

HamiltonianSystem2D radial(double half = 10.0) {
  return HamiltonianSystem2D(std::make_shared<RadialQuadratic>(), std::make_shared<ZeroField>(), 0.5,
                             Box{{-half, -half}, {half, half}}, "radial-quadratic");
}

HamiltonianSystem2D duffing() {
  return HamiltonianSystem2D(std::make_shared<DuffingWell>(), std::make_shared<ZeroField>(), 0.5,
                             Box{{-4, -4}, {4, 4}}, "duffing-well");
}

// Classical RK4 with a fixed step, used as an independent reference.
Vec2 rk4(const HamiltonianSystem2D& sys, Vec2 x, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Vec2 k1 = sys.shear(x), k2 = sys.shear(x + 0.5 * h * k1), k3 = sys.shear(x + 0.5 * h * k2),
               k4 = sys.shear(x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST(Expression, ParsesAndDifferentiates) {
  const auto e = Expression::parse("x1^2*x2 - 3*sin(x2) + exp(-x1)/2");
  const Vec2 p(0.7, -1.3);
  const double v = 0.49 * -1.3 - 3 * std::sin(-1.3) + std::exp(-0.7) / 2;
  EXPECT_NEAR(e.evaluate(p), v, 1e-14);
  EXPECT_NEAR(e.derivative(0).evaluate(p), 2 * 0.7 * -1.3 - std::exp(-0.7) / 2, 1e-14);
  EXPECT_NEAR(e.derivative(1).evaluate(p), 0.49 - 3 * std::cos(-1.3), 1e-14);
}

TEST(Expression, PrecedenceAndAssociativity) {
  const Vec2 p(2.0, 3.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-x1^2").evaluate(p), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2").evaluate(p), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("x2 - x1 - 1").evaluate(p), 0.0);
  EXPECT_DOUBLE_EQ(Expression::parse("1.5e1 / 3 / 5").evaluate(p), 1.0);
  EXPECT_DOUBLE_EQ(Expression::parse("x1^-1").evaluate(p), 0.5);
}

TEST(Expression, RejectsMalformedInput) {
  for (const char* bad : {"", "x3", "1 +", "sin x1", "(x1", "0x10", "x1 ** 2", "log(x1)", "2e"}) {
    try {
      Expression::parse(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << bad;
    }
  }
}

TEST(Hamiltonian, PresetGradientsMatchFiniteDifferences) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (const char* name : {"radial-quadratic", "duffing-well", "x1^3*x2 + cos(x1*x2) - exp(x2/3)"}) {
    const auto H = make_hamiltonian(name);
    for (int i = 0; i < 50; ++i) {
      const Vec2 x(u(gen), u(gen));
      const double e = 1e-6;
      const Vec2 fd((H->value(x + Vec2(e, 0)) - H->value(x - Vec2(e, 0))) / (2 * e),
                    (H->value(x + Vec2(0, e)) - H->value(x - Vec2(0, e))) / (2 * e));
      EXPECT_LT((fd - H->gradient(x)).norm(), 1e-6 * (1 + fd.norm())) << name;
      const Mat2 hs = H->hessian(x);
      EXPECT_DOUBLE_EQ(hs(0, 1), hs(1, 0));
      const Mat2 fdh = [&] {
        Mat2 m;
        m.col(0) = (H->gradient(x + Vec2(e, 0)) - H->gradient(x - Vec2(e, 0))) / (2 * e);
        m.col(1) = (H->gradient(x + Vec2(0, e)) - H->gradient(x - Vec2(0, e))) / (2 * e);
        return m;
      }();
      EXPECT_LT((fdh - hs).norm(), 1e-5 * (1 + hs.norm())) << name;
    }
  }
}

TEST(Hamiltonian, ShearIsTangentToLevelSets) {
  const auto sys = duffing();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x(u(gen), u(gen));
    EXPECT_NEAR(sys.shear(x).dot(sys.grad_H(x)), 0.0, 1e-12 * (1 + sys.grad_H(x).squaredNorm()));
  }
}

TEST(FlowStep, QuarterTurnOfRigidRotation) {
  const Vec2 out = flow_step(radial(), Vec2(1, 0), M_PI / 2, 1e-12);
  EXPECT_NEAR(out[0], 0.0, 1e-8);
  EXPECT_NEAR(out[1], 1.0, 1e-8);
}

TEST(FlowStep, ZeroDurationIsIdentity) {
  const Vec2 x(0.3, -1.7);
  const Vec2 out = flow_step(duffing(), x, 0.0);
  EXPECT_EQ(out[0], x[0]);
  EXPECT_EQ(out[1], x[1]);
}

TEST(FlowStep, DuffingAgreesWithFineReference) {
  const auto sys = duffing();
  const Vec2 x(1.5, 0.0);
  const Vec2 out = flow_step(sys, x, 0.1, 1e-12);
  EXPECT_LT(std::abs(sys.H(out) - sys.H(x)), 1e-10);
  const Vec2 ref = rk4(sys, x, 0.1, 1000);
  EXPECT_LT((out - ref).norm(), 1e-10);
}

TEST(FlowStep, LeavingTheBoxIsReported) {
  // Orbits of x1·x2 are hyperbolas and run off to infinity.
  HamiltonianSystem2D sys(make_hamiltonian("x1*x2"), std::make_shared<ZeroField>(), 0.5, Box{{-2, -2}, {2, 2}});
  try {
    flow_step(sys, Vec2(1.0, 0.5), 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfDomain);
  }
}

TEST(TraceOrbit, RadialPeriodIsTwoPi) {
  const auto sys = radial();
  for (double r : {0.05, 0.5, 1.0, 3.0, 7.0}) {
    const Orbit o = trace_orbit(sys, Vec2(r, 0));
    EXPECT_NEAR(o.period, 2 * M_PI, 1e-8) << r;
    EXPECT_LT(o.energy_error, 1e-9 * (1 + o.level));
  }
}

TEST(TraceOrbit, RotationEquivariantForRadialField) {
  const auto sys = radial();
  for (double r : {0.2, 2.0}) {
    EXPECT_NEAR(trace_orbit(sys, Vec2(r, 0)).period, trace_orbit(sys, Vec2(0, r)).period, 1e-9);
  }
}

TEST(TraceOrbit, DuffingCenterPeriodApproachesLinearisation) {
  // Hessian at (±1, 0) is diag(2, 1), so small orbits rotate at frequency √2.
  const auto sys = duffing();
  double prev_err = 1.0;
  for (double d : {0.1, 0.03, 0.01, 0.003}) {
    for (double s : {1.0, -1.0}) {
      const double T = trace_orbit(sys, Vec2(s * (1 + d), 0)).period;
      const double err = std::abs(T - 2 * M_PI / std::sqrt(2.0));
      EXPECT_LT(err, 5.0 * d) << d;
      if (s > 0) {
        EXPECT_LT(err, prev_err);
        prev_err = err;
      }
    }
  }
  EXPECT_LT(prev_err, 1e-3);
}

TEST(TraceOrbit, NonConvexOuterOrbitCloses) {
  const auto sys = duffing();
  for (double x : {1.5, 1.45, 1.42}) {
    const Orbit o = trace_orbit(sys, Vec2(x, 0));
    EXPECT_GT(o.period, 0.0);
    EXPECT_TRUE(orbit_encloses(o, Vec2(1, 0)));
    EXPECT_TRUE(orbit_encloses(o, Vec2(-1, 0)));
    EXPECT_TRUE(orbit_encloses(o, Vec2(0, 0)));
    const Vec2 back = flow_step(sys, Vec2(x, 0), o.period, 1e-12);
    EXPECT_LT((back - Vec2(x, 0)).norm(), 1e-7);
  }
}

TEST(TraceOrbit, NearCriticalAnchorIsRejected) {
  try {
    trace_orbit(duffing(), Vec2(0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearCritical);
  }
}

TEST(TraceOrbit, HyperbolaIsNotClosed) {
  HamiltonianSystem2D sys(make_hamiltonian("x1*x2"), std::make_shared<ZeroField>(), 0.5, Box{{-2, -2}, {2, 2}});
  try {
    trace_orbit(sys, Vec2(1.0, 0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotClosed);
  }
}

TEST(TraceOrbit, PeriodContinuousAlongAnEdge) {
  const auto sys = duffing();
  const double T0 = trace_orbit(sys, Vec2(1.5, 0)).period;
  const double T1 = trace_orbit(sys, Vec2(1.5 + 1e-4, 0)).period;
  EXPECT_LT(std::abs(T1 - T0), 1e-2);
}

TEST(OrbitAverage, ConstantAveragesToOne) {
  const Orbit o = trace_orbit(duffing(), Vec2(1.5, 0));
  EXPECT_EQ(orbit_average(o, [](const Vec2&) { return 1.0; }), 1.0);
}

TEST(OrbitAverage, RadialGradientSquaredIsTwiceLevel) {
  const auto sys = radial();
  for (double r : {0.3, 1.0, 2.5}) {
    const Orbit o = trace_orbit(sys, Vec2(r, 0));
    EXPECT_NEAR(orbit_average(o, [&](const Vec2& x) { return sys.grad_H(x).squaredNorm(); }), 2 * o.level,
                1e-9 * (1 + o.level));
    EXPECT_NEAR(orbit_average(o, [](const Vec2& x) { return x[0]; }), 0.0, 1e-8);
  }
}

TEST(OrbitAverage, LinearInTheObservable) {
  const Orbit o = trace_orbit(duffing(), Vec2(0.5, 0));
  const auto f = [](const Vec2& x) { return x[0] * x[0]; };
  const auto g = [](const Vec2& x) { return std::cos(x[1]); };
  const double lhs = orbit_average(o, [&](const Vec2& x) { return 2 * f(x) - 3 * g(x); });
  EXPECT_NEAR(lhs, 2 * orbit_average(o, f) - 3 * orbit_average(o, g), 1e-13);
}

TEST(OrbitAverage, MatchesLineIntegralRoute) {
  // (1/T)∮ g dℓ/|∇H| approximated on the polyline must agree with the time average.
  const auto sys = duffing();
  OrbitOptions opt;
  opt.min_samples = 1 << 14;
  const Orbit o = trace_orbit(sys, Vec2(0.4, 0), opt);
  double T = 0.0;
  const std::size_t n = o.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 a = o.points[k], b = o.points[(k + 1) % n];
    T += (b - a).norm() / sys.grad_H(0.5 * (a + b)).norm();
  }
  EXPECT_NEAR(T / o.period, 1.0, 1e-6);
}
