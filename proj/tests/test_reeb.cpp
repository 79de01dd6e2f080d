#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "avlab/common/error.hpp"
#include "avlab/fields/orbit.hpp"
#include "avlab/reeb/critical_points.hpp"
#include "avlab/reeb/graph_builder.hpp"
#include "avlab/reeb/metric_graph.hpp"

using namespace avlab;

namespace {

HamiltonianSystem2D make(const char* h, double half) {
  return HamiltonianSystem2D(make_hamiltonian(h), std::make_shared<ZeroField>(), 0.5, Box{{-half, -half}, {half, half}},
                             h);
}

int count_kind(const std::vector<CriticalPoint>& cs, CriticalKind k) {
  return static_cast<int>(std::count_if(cs.begin(), cs.end(), [&](const auto& c) { return c.kind == k; }));
}

}  // namespace

TEST(CriticalPoints, RadialHasOneMinimum) {
  const auto cs = find_critical_points(make("radial-quadratic", 5), 16);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].kind, CriticalKind::Min);
  EXPECT_LT(cs[0].location.norm(), 1e-12);
  EXPECT_NEAR(cs[0].value, 0.0, 1e-24);
}

TEST(CriticalPoints, DuffingWellsAndSaddle) {
  const auto cs = find_critical_points(make("duffing-well", 3), 32);
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_EQ(count_kind(cs, CriticalKind::Min), 2);
  EXPECT_EQ(count_kind(cs, CriticalKind::Saddle), 1);
  EXPECT_NEAR(cs[0].location[0], -1.0, 1e-12);
  EXPECT_NEAR(cs[1].location[0], 1.0, 1e-12);
  EXPECT_NEAR(cs[0].value, 0.0, 1e-15);
  EXPECT_EQ(cs[2].kind, CriticalKind::Saddle);
  EXPECT_LT(cs[2].location.norm(), 1e-12);
  EXPECT_NEAR(cs[2].value, 0.25, 1e-15);
}

TEST(CriticalPoints, MonkeySaddleIsDegenerate) {
  try {
    find_critical_points(make("x1^3 - 3*x1*x2^2", 2), 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateCritical);
  }
}

TEST(CriticalPoints, GridTooCoarseIsRejected) {
  EXPECT_THROW(find_critical_points(make("radial-quadratic", 2), 8), Error);
}

TEST(BuildGraph, RadialIsOneHalfLine) {
  const auto sys = make("radial-quadratic", 5);
  const auto g = build_graph(sys, find_critical_points(sys, 16));
  ASSERT_EQ(g.edges.size(), 1u);
  ASSERT_EQ(g.vertices.size(), 1u);
  EXPECT_EQ(g.edges[0].lo, 0.0);
  EXPECT_FALSE(g.edges[0].bounded());
  EXPECT_EQ(g.vertices[0].degree(), 1);
  EXPECT_EQ(g.vertices[0].level, 0.0);
}

TEST(BuildGraph, DuffingIsAThreeEdgeStar) {
  const auto sys = make("duffing-well", 3);
  const auto g = build_graph(sys, find_critical_points(sys, 32));
  ASSERT_EQ(g.edges.size(), 3u);
  ASSERT_EQ(g.vertices.size(), 3u);
  int inner = 0, outer = 0;
  for (const auto& e : g.edges) {
    if (e.bounded()) {
      ++inner;
      EXPECT_EQ(e.lo, 0.0);
      EXPECT_NEAR(e.hi, 0.25, 1e-15);
      EXPECT_EQ(e.encloses.size(), 1u);
    } else {
      ++outer;
      EXPECT_NEAR(e.lo, 0.25, 1e-15);
      EXPECT_EQ(e.encloses.size(), 2u);
    }
  }
  EXPECT_EQ(inner, 2);
  EXPECT_EQ(outer, 1);
  std::vector<int> degrees;
  for (const auto& v : g.vertices) degrees.push_back(v.degree());
  std::sort(degrees.begin(), degrees.end());
  EXPECT_EQ(degrees, (std::vector<int>{1, 1, 3}));
}

TEST(BuildGraph, RegularCrossingLevelsAreMerged) {
  // Two wells of different depth: the deeper well's family passes the shallow
  // minimum's level without touching it.
  const auto sys = make("(x1^2 - 1)^2/4 + x2^2/2 + x1/5", 3);
  const auto g = build_graph(sys, find_critical_points(sys, 32));
  ASSERT_EQ(g.edges.size(), 3u);
  ASSERT_EQ(g.vertices.size(), 3u);
  std::vector<int> degrees;
  for (const auto& v : g.vertices) degrees.push_back(v.degree());
  std::sort(degrees.begin(), degrees.end());
  EXPECT_EQ(degrees, (std::vector<int>{1, 1, 3}));
}

TEST(BuildGraph, DegreeSumMatchesFiniteEnds) {
  const auto sys = make("duffing-well", 3);
  const auto g = build_graph(sys, find_critical_points(sys, 32));
  int deg = 0, ends = 0;
  for (const auto& v : g.vertices) deg += v.degree();
  for (const auto& e : g.edges) ends += 1 + (e.bounded() ? 1 : 0);
  EXPECT_EQ(deg, ends);
}

TEST(BuildGraph, JsonRoundTrip) {
  const auto sys = make("duffing-well", 3);
  const auto g = build_graph(sys, find_critical_points(sys, 32));
  const auto back = MetricGraph::from_json(g.to_json());
  EXPECT_EQ(back.to_json(), g.to_json());
  EXPECT_THROW(MetricGraph::from_json("{\"schema_version\": 2}"), Error);
}

TEST(BuildGraph, AnchorsLieOnTheirEdges) {
  const auto sys = make("duffing-well", 3);
  const auto g = build_graph(sys, find_critical_points(sys, 32));
  const Projection proj(sys, g);
  for (const auto& e : g.edges) {
    for (double h : {e.lo + 1e-3, e.lo + 0.1, e.bounded() ? e.hi - 1e-3 : e.lo + 2.0}) {
      const Vec2 a = g.anchor(sys, e.id, h);
      EXPECT_NEAR(sys.H(a), h, 1e-12);
      EXPECT_EQ(proj.classify(a).edge, e.id);
    }
  }
}

TEST(Projection, ClassifiesDuffingPoints) {
  const auto sys = make("duffing-well", 3);
  const auto g = build_graph(sys, find_critical_points(sys, 32));
  const Projection proj(sys, g);
  const auto outer = std::find_if(g.edges.begin(), g.edges.end(), [](const auto& e) { return !e.bounded(); })->id;
  const auto loc = proj.classify(Vec2(1.5, 0));
  EXPECT_EQ(loc.edge, outer);
  EXPECT_EQ(loc.h, sys.H(Vec2(1.5, 0)));
  EXPECT_DOUBLE_EQ(loc.h, 25.0 / 64.0);
  const auto left = proj.classify(Vec2(-1.2, 0.1)), right = proj.classify(Vec2(0.9, -0.2));
  EXPECT_NE(left.edge, right.edge);
  EXPECT_TRUE(g.edges[left.edge].bounded());
  EXPECT_TRUE(g.edges[right.edge].bounded());
  EXPECT_TRUE(proj.classify(Vec2(0, 0)).on_vertex());
  EXPECT_EQ(g.vertex(proj.classify(Vec2(0, 0)).vertex).degree(), 3);
}

TEST(Projection, ConstantAlongOrbits) {
  const auto sys = make("duffing-well", 3);
  const auto g = build_graph(sys, find_critical_points(sys, 32));
  const Projection proj(sys, g);
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.8, 1.8);
  for (int i = 0; i < 40; ++i) {
    const Vec2 x(u(gen), u(gen));
    if (std::abs(sys.H(x) - 0.25) < 1e-3) continue;
    const auto a = proj.classify(x);
    for (double t : {0.37, 1.9, 5.3}) {
      const auto b = proj.classify(flow_step(sys, x, t, 1e-11));
      EXPECT_EQ(a.edge, b.edge);
      EXPECT_NEAR(a.h, b.h, 1e-9);
    }
  }
}

TEST(Truncation, BoundMatchesTailInequality) {
  const double n = truncation_bound(0.5, 2.0, 1.0, 1e-4);
  EXPECT_NEAR(std::exp(1.0) * 2.0 / (n + 1), 1e-4, 1e-16);
}
