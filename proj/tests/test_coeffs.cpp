#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>

#include "avlab/coeffs/asymptotics.hpp"
#include "avlab/coeffs/contraction.hpp"
#include "avlab/coeffs/edge_table.hpp"
#include "avlab/coeffs/transmission.hpp"
#include "avlab/common/error.hpp"
#include "avlab/fields/orbit.hpp"
#include "avlab/reeb/critical_points.hpp"
#include "avlab/reeb/graph_builder.hpp"

using namespace avlab;

namespace {

struct Model {
  HamiltonianSystem2D sys;
  MetricGraph graph;
};

Model radial(std::shared_ptr<const VectorField2D> drift = std::make_shared<ZeroField>()) {
  HamiltonianSystem2D sys(std::make_shared<RadialQuadratic>(), std::move(drift), 0.5, Box{{-6, -6}, {6, 6}});
  auto g = build_graph(sys, find_critical_points(sys, 16));
  return {sys, g};
}

const Model& duffing() {
  static const Model m = [] {
    HamiltonianSystem2D sys(std::make_shared<DuffingWell>(), std::make_shared<ZeroField>(), 0.5, Box{{-4, -4}, {4, 4}});
    auto g = build_graph(sys, find_critical_points(sys, 32));
    return Model{sys, g};
  }();
  return m;
}

int outer_edge(const MetricGraph& g) {
  for (const auto& e : g.edges)
    if (!e.bounded()) return e.id;
  return -1;
}

GridSpec radial_spec() {
  GridSpec s;
  s.nodes = 48;
  s.truncation = 12.0;
  return s;
}

}  // namespace

TEST(EdgeGrid, ClusteredAndIncreasing) {
  GridSpec s;
  s.nodes = 64;
  const auto h = edge_grid(0.0, 0.25, false, s);
  ASSERT_EQ(h.size(), 64u);
  for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LT(h[k - 1], h[k]);
  int near = 0;
  for (double x : h)
    if (x <= 0.025 * (1 + 1e-12) || x >= 0.225 * (1 - 1e-12)) ++near;
  EXPECT_GE(near, 32);
  EXPECT_NEAR(h.front(), 0.25e-7, 1e-15);
  const auto t = edge_grid(0.0, 10.0, true, s);
  EXPECT_DOUBLE_EQ(t.back(), 10.0);
}

TEST(EdgeTable, RadialColumnsMatchClosedForms) {
  const Model m = radial();
  const auto t = tabulate_edge(m.sys, m.graph, 0, radial_spec());
  for (std::size_t k = 0; k < t.h.size(); ++k) {
    const double h = t.h[k];
    EXPECT_NEAR(t.T[k] / (2 * M_PI), 1.0, 1e-6) << h;
    EXPECT_NEAR(t.a[k] / (4 * M_PI * h), 1.0, 1e-4) << h;
    EXPECT_NEAR(t.sigma2[k] / (2 * h), 1.0, 1e-4) << h;
    EXPECT_EQ(t.c[k], 0.0);
    EXPECT_NEAR(t.b[k], 1.0, 1e-3) << h;
  }
}

TEST(EdgeTable, RadialWithRestoringDrift) {
  // V0 = −x gives V0·∇H = −|x|² = −2h on the level h.
  const Model m = radial(std::make_shared<LinearRestoring>(1.0));
  const auto t = tabulate_edge(m.sys, m.graph, 0, radial_spec());
  for (std::size_t k = 0; k < t.h.size(); ++k) {
    EXPECT_NEAR(t.c[k], -2 * t.h[k], 1e-8 * (1 + t.h[k]));
    EXPECT_NEAR(t.b[k], 1 - 2 * t.h[k], 1e-7 * (1 + t.h[k]));
  }
}

TEST(EdgeTable, InterpolantsReproduceNodes) {
  const Model m = radial();
  const auto t = tabulate_edge(m.sys, m.graph, 0, radial_spec());
  for (std::size_t k = 0; k < t.h.size(); ++k) {
    EXPECT_EQ(t.T_of(t.h[k]), t.T[k]);
    EXPECT_EQ(t.sigma2_of(t.h[k]), t.sigma2[k]);
    EXPECT_EQ(t.b_of(t.h[k]), t.b[k]);
  }
  EXPECT_NE(t.to_csv().find("h,T,a,sigma2,c,b\n"), std::string::npos);
}

TEST(EdgeTable, DuffingPositivityAndDriftFree) {
  const auto& m = duffing();
  GridSpec s;
  s.nodes = 40;
  s.truncation = 3.0;
  for (const auto& e : m.graph.edges) {
    const auto t = tabulate_edge(m.sys, m.graph, e.id, s);
    for (std::size_t k = 0; k < t.h.size(); ++k) {
      EXPECT_GT(t.T[k], 0.0);
      EXPECT_GT(t.a[k], 0.0);
      EXPECT_GT(t.sigma2[k], 0.0);
      EXPECT_TRUE(std::isfinite(t.b[k]));
      EXPECT_EQ(t.c[k], 0.0);
    }
    if (e.bounded()) {
      // Harmonic limit at the well bottom.
      EXPECT_NEAR(t.T.front(), 2 * M_PI / std::sqrt(2.0), 1e-5);
    }
  }
}

TEST(EdgeTable, StokesSlopeMatchesFiniteDifferences) {
  const auto& m = duffing();
  for (const auto& e : m.graph.edges) {
    const double top = e.bounded() ? e.hi : 2.0;
    for (double u : {0.2, 0.5, 0.8}) {
      const double h = e.lo + u * (top - e.lo), d = 1e-4 * (top - e.lo);
      const auto at = [&](double level) { return level_coefficients(m.sys, m.graph.anchor(m.sys, e.id, level), 1e-12); };
      const auto mid = at(h), up = at(h + d), down = at(h - d);
      const double fd = (up.sigma2 * up.T - down.sigma2 * down.T) / (2 * d);
      EXPECT_NEAR(mid.flux_slope / fd, 1.0, 1e-4) << e.id << " " << h;
    }
  }
}

TEST(EdgeTable, InterpolantRouteAgreesWithStokesRoute) {
  const Model m = radial();
  const auto t = tabulate_edge(m.sys, m.graph, 0, radial_spec());
  for (double h : {0.5, 2.0, 7.0}) EXPECT_NEAR(t.b_by_interpolant(h), t.b_of(h), 1e-3);
}

TEST(EdgeTable, ReturnTimeMatchesLineIntegral) {
  const auto& m = duffing();
  OrbitOptions opt;
  opt.min_samples = 1 << 14;
  const Orbit o = trace_orbit(m.sys, m.graph.anchor(m.sys, outer_edge(m.graph), 0.6), opt);
  double T = 0.0;
  for (std::size_t k = 0; k < o.size(); ++k) {
    const Vec2 a = o.points[k], b = o.points[(k + 1) % o.size()];
    const Vec2 mid = 0.5 * (a + b);
    T += (b - a).norm() / m.sys.grad_H(mid).norm();
  }
  EXPECT_NEAR(T / o.period, 1.0, 1e-6);
}

TEST(Transmission, RadialExtremumHasZeroWeight) {
  const Model m = radial();
  const auto tw = transmission_weights(m.sys, m.graph);
  ASSERT_EQ(tw.size(), 1u);
  EXPECT_EQ(tw[0].weights[0], 0.0);
  EXPECT_EQ(tw[0].probabilities[0], 1.0);
}

TEST(Transmission, DuffingSaddleWeights) {
  const auto& m = duffing();
  const auto tw = transmission_weights(m.sys, m.graph);
  const VertexTransmission* saddle = nullptr;
  for (const auto& vt : tw)
    if (vt.ends.size() == 3) saddle = &vt;
  ASSERT_NE(saddle, nullptr);
  double inner[2];
  int ni = 0;
  double outer = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (m.graph.edge(saddle->ends[k].edge).bounded())
      inner[ni++] = saddle->weights[k];
    else
      outer = saddle->weights[k];
  }
  ASSERT_EQ(ni, 2);
  EXPECT_NEAR(inner[0] / inner[1], 1.0, 1e-6);
  EXPECT_NEAR(outer / (inner[0] + inner[1]), 1.0, 1e-3);

  // Divergence theorem: a at the saddle level is ∫ΔH over one lobe.
  const auto lobe = [](double x) {
    const double w = 0.5 * (1 - (x * x - 1) * (x * x - 1));
    return w > 0 ? 3 * x * x * 2 * std::sqrt(w) : 0.0;
  };
  const double a_lobe = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(lobe, 0.0, std::sqrt(2.0), 20, 1e-13);
  EXPECT_NEAR(inner[0] / (0.5 * a_lobe), 1.0, 1e-4);
  double psum = 0;
  for (double p : saddle->probabilities) psum += p;
  EXPECT_NEAR(psum, 1.0, 1e-15);
  EXPECT_NE(transmissions_to_json(tw).find("\"alpha\""), std::string::npos);
}

TEST(Transmission, NonzeroWeightAtExtremumIsRejected) {
  const auto& m = duffing();
  TransmissionOptions opt;
  opt.eps_alpha = -1.0;
  try {
    transmission_weights(m.sys, m.graph, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonzeroAtExtremum);
  }
}

TEST(Asymptotics, RadialExtremum) {
  const Model m = radial();
  GridSpec s = radial_spec();
  s.nodes = 64;
  const auto t = tabulate_edge(m.sys, m.graph, 0, s);
  const auto fit = asymptotic_fit(t, m.graph, EndSide::Lower);
  EXPECT_EQ(fit.regime, EndRegime::Extremum);
  EXPECT_NEAR(fit.a_coef, 4 * M_PI, 1e-4);
  EXPECT_NEAR(fit.t_coef, 2 * M_PI, 1e-6);
  EXPECT_GE(fit.r2, 0.999);
}

TEST(Asymptotics, DuffingInnerEdgeEnds) {
  const auto& m = duffing();
  GridSpec s;
  s.nodes = 64;
  for (const auto& e : m.graph.edges) {
    if (!e.bounded()) continue;
    const auto t = tabulate_edge(m.sys, m.graph, e.id, s);
    const auto top = asymptotic_fit(t, m.graph, EndSide::Upper);
    EXPECT_EQ(top.regime, EndRegime::Saddle);
    EXPECT_GT(top.t_coef, 0.0);
    EXPECT_GE(top.r2, 0.99);
    EXPECT_GE(top.decades, 3.0);
    // Saddle eigenvalues ±1 give T ≈ (1/√1)|log d| per passage, once per loop.
    EXPECT_NEAR(top.t_coef, 1.0, 0.05);
    const auto bottom = asymptotic_fit(t, m.graph, EndSide::Lower);
    EXPECT_EQ(bottom.regime, EndRegime::Extremum);
    EXPECT_NEAR(bottom.t_coef / (2 * M_PI / std::sqrt(2.0)), 1.0, 1e-3);
    EXPECT_GE(bottom.r2, 0.999);
  }
}

TEST(Asymptotics, NarrowWindowIsRejected) {
  const Model m = radial();
  const auto t = tabulate_edge(m.sys, m.graph, 0, radial_spec());
  try {
    asymptotic_fit(t, m.graph, EndSide::Lower, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WindowTooNarrow);
  }
}

TEST(Contraction, ConstantsGiveZero) {
  const Model m = radial();
  const auto tables = tabulate_all(m.sys, m.graph, radial_spec());
  const GraphFunction one{[](int, double) { return 1.0; }, [](int, double) { return 0.0; }};
  const auto r = form_contraction_check(m.sys, m.graph, tables, one, one, 2000, 5);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

namespace {

// Smooth bump supported on (1, 4) in h.
double bump(double h) { return h > 1 && h < 4 ? std::exp(-1.0 / ((h - 1) * (4 - h))) : 0.0; }
double bump_prime(double h) {
  if (!(h > 1 && h < 4)) return 0.0;
  const double q = (h - 1) * (4 - h);
  return bump(h) * (5 - 2 * h) / (q * q);
}

}  // namespace

TEST(Contraction, RadialBumpBothSidesAgree) {
  for (bool with_drift : {false, true}) {
    std::shared_ptr<const VectorField2D> drift = std::make_shared<ZeroField>();
    if (with_drift) drift = std::make_shared<LinearRestoring>(0.5);
    const Model m = radial(drift);
    const auto tables = tabulate_all(m.sys, m.graph, radial_spec());
    const GraphFunction f{[](int, double h) { return bump(h); }, [](int, double h) { return bump_prime(h); }};
    const auto r = form_contraction_check(m.sys, m.graph, tables, f, f, 200000, 9);
    const double exact = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double h) {
          const double fp = bump_prime(h);
          return 0.5 * fp * fp * 2 * h * 2 * M_PI - (with_drift ? -h : 0.0) * fp * bump(h) * 2 * M_PI;
        },
        1.0, 4.0, 20, 1e-12);
    EXPECT_NEAR(r.lhs / exact, 1.0, 1e-5);
    EXPECT_LT(std::abs(r.rhs - r.lhs), 3 * r.mc_stderr);
    EXPECT_GT(r.mc_stderr, 0.0);
  }
}
