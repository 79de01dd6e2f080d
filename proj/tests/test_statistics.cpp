#include <gtest/gtest.h>

#include <cmath>

#include "avlab/bench/statistics.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/rng.hpp"

using namespace avlab;

namespace {

std::vector<double> uniforms(std::uint64_t seed, std::size_t n, double shift = 0.0, double scale = 1.0) {
  RandomStream rng(seed, StreamId::MonteCarlo, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = shift + scale * rng.uniform();
  return x;
}

}  // namespace

TEST(Ks, IdenticalSamplesGiveZero) {
  const auto a = uniforms(1, 1000);
  EXPECT_EQ(ks_distance(a, a).statistic, 0.0);
}

TEST(Ks, ShiftedUniformsApproachHalf) {
  const auto r = ks_distance(uniforms(1, 200000), uniforms(2, 200000, 0.5));
  EXPECT_NEAR(r.statistic, 0.5, 0.01);
}

TEST(Ks, ThresholdCalibration) {
  int below = 0;
  const int reps = 300;
  for (int r = 0; r < reps; ++r) below += ks_distance(uniforms(10 + 2 * r, 10000), uniforms(11 + 2 * r, 10000)).below();
  EXPECT_GE(below, static_cast<int>(0.97 * reps));
  EXPECT_NEAR(ks_threshold_99(10000, 10000), 1.6276 * std::sqrt(2.0 / 10000), 1e-4);
}

TEST(Ks, EmptyLawRejected) {
  std::vector<double> a{1.0}, b;
  EXPECT_THROW(ks_distance(a, b), Error);
  EXPECT_THROW(wasserstein1(b, a), Error);
}

TEST(Ks, Symmetric) {
  const auto a = uniforms(3, 500), b = uniforms(4, 700, 0.1);
  EXPECT_EQ(ks_distance(a, b).statistic, ks_distance(b, a).statistic);
  EXPECT_DOUBLE_EQ(wasserstein1(a, b), wasserstein1(b, a));
}

TEST(Wasserstein, PointMasses) {
  std::vector<double> a(10, 0.0), b(7, 1.0);
  EXPECT_DOUBLE_EQ(wasserstein1(a, b), 1.0);
  EXPECT_EQ(wasserstein1(a, a), 0.0);
}

TEST(Wasserstein, UniformScaling) {
  EXPECT_NEAR(wasserstein1(uniforms(5, 200000), uniforms(6, 200000, 0.0, 2.0)), 0.5, 0.01);
}

TEST(Wasserstein, MatchesSortedPairingForEqualSizes) {
  auto a = uniforms(7, 300), b = uniforms(8, 300, 0.2, 0.5);
  double ref = 0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) ref += std::abs(a[i] - b[i]) / a.size();
  EXPECT_NEAR(wasserstein1(a, b), ref, 1e-12);
}

TEST(TotalVariation, DiscreteMarginals) {
  std::vector<std::int32_t> a{0, 0, 1, 1}, b{0, 1, 1, 1};
  EXPECT_DOUBLE_EQ(total_variation(a, b), 0.25);
  EXPECT_DOUBLE_EQ(total_variation(a, a), 0.0);
}

TEST(Summary, MeanStderrQuantiles) {
  std::vector<double> x{1, 2, 3, 4, 5};
  const auto s = summarize(x);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_NEAR(s.stderr_mean, std::sqrt(2.5 / 5), 1e-14);
  EXPECT_DOUBLE_EQ(s.q50, 3.0);
}

TEST(GraphDistanceTest, ZeroOnIdenticalAndSymmetric) {
  Ensemble e;
  e.times = {1.0};
  RandomStream rng(1, StreamId::MonteCarlo, 0);
  for (int i = 0; i < 400; ++i) {
    PathRecord p;
    p.resize(1);
    p.label[0] = static_cast<std::int32_t>(rng.below(3));
    p.c1[0] = rng.uniform();
    e.paths.push_back(p);
  }
  Ensemble f = e;
  for (auto& p : f.paths) p.c1[0] += 0.05;
  f.paths[0].mark(ErrorKind::OutOfDomain);
  const auto la = EmpiricalLaw::from_ensemble(e), lb = EmpiricalLaw::from_ensemble(f);
  EXPECT_EQ(lb.excluded, 1u);
  EXPECT_EQ(graph_distance(la, la, 0).combined, 0.0);
  const auto ab = graph_distance(la, lb, 0), ba = graph_distance(lb, la, 0);
  EXPECT_DOUBLE_EQ(ab.combined, ba.combined);
  EXPECT_GT(ab.weighted_ks, 0.0);
}

TEST(GraphDistanceTest, DisjointLabelsAreFar) {
  Ensemble e, f;
  e.times = f.times = {0.0};
  for (int i = 0; i < 10; ++i) {
    PathRecord p;
    p.resize(1);
    p.label[0] = 0;
    e.paths.push_back(p);
    p.label[0] = 1;
    f.paths.push_back(p);
  }
  const auto d = graph_distance(EmpiricalLaw::from_ensemble(e), EmpiricalLaw::from_ensemble(f), 0);
  EXPECT_DOUBLE_EQ(d.tv, 1.0);
  EXPECT_DOUBLE_EQ(d.combined, 1.0);
}
