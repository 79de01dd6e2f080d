#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "avlab/fields/hamiltonian.hpp"
#include "avlab/reeb/metric_graph.hpp"

namespace avlab {

/// Monotone piecewise-cubic (PCHIP) interpolant, clamped to its node range.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool empty() const { return !impl_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double lo_ = 0.0, hi_ = 0.0;
};

struct GridSpec {
  int nodes = 64;
  /// Upper level used in place of +∞ for an unbounded edge.
  double truncation = 0.0;
  /// Closest node to a finite end, relative to the edge length.
  double min_distance = 1e-7;
  /// Fraction of the edge next to each finite end that holds half the nodes.
  double end_zone = 0.1;
  double tol = 1e-10;
  unsigned threads = 1;
};

/// Strictly increasing levels inside (lo, hi_eff), asinh-clustered at the
/// finite ends; hi_eff is included when the edge is unbounded.
std::vector<double> edge_grid(double lo, double hi, bool hi_is_truncation, const GridSpec& spec);

/// An extra orbit average to tabulate next to the generator coefficients.
using Observable = std::function<double(const Vec2&)>;

/// Generator data of one edge on an h-grid: period T, a = ∫₀ᵀ|∇H|²dt,
/// diffusion σ² = 2νa/T, drift part c = (1/T)∫₀ᵀ V0·∇H dt, and
/// b = (σ²T)'/(2T) + c where (σ²T)' = 2ν∫₀ᵀ ΔH dt.
struct EdgeCoefficientTable {
  int edge = -1;
  double lo = 0.0, hi = 0.0;
  std::vector<double> h, T, a, sigma2, c, b;
  /// (σ²T)' at the nodes.
  std::vector<double> flux_slope;
  std::vector<std::vector<double>> extra;

  MonotoneCubic T_of, sigma2_of, b_of, sigma2T_of, cT_of;
  std::vector<MonotoneCubic> extra_of;

  double range_lo() const { return h.front(); }
  double range_hi() const { return h.back(); }
  /// b from differentiating the σ²T interpolant.
  double b_by_interpolant(double level) const;

  void build_interpolants();
  std::string to_csv() const;
};

/// Coefficients of a single level, traced afresh.
struct LevelCoefficients {
  double T, a, sigma2, c, b, flux_slope;
  std::vector<double> extra;
};
LevelCoefficients level_coefficients(const HamiltonianSystem2D& sys, const Vec2& anchor, double tol,
                                     const std::vector<Observable>& extra = {});

EdgeCoefficientTable tabulate_edge(const HamiltonianSystem2D& sys, const MetricGraph& graph, int edge,
                                   const GridSpec& spec, const std::vector<Observable>& extra = {});

std::vector<EdgeCoefficientTable> tabulate_all(const HamiltonianSystem2D& sys, const MetricGraph& graph,
                                               const GridSpec& spec, const std::vector<Observable>& extra = {});

}  // namespace avlab
