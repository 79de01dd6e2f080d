#pragma once

#include <vector>

#include "avlab/coeffs/edge_table.hpp"
#include "avlab/fields/orbit.hpp"
#include "avlab/flows/noise.hpp"
#include "avlab/graphsim/graph_model.hpp"

namespace avlab {

/// The observables U_k·∇H, to be tabulated as extra orbit averages.
std::vector<Observable> noise_observables(const HamiltonianSystem2D& sys, const NoiseModel& noise);

/// Orbit-averaged common noise on the graph, read from the extra columns
/// [first, first + count) of the model's edge tables:
///   Ũ_k(y) = μ_y(U_k·∇H),  C̃(y₁, y₂) = ½ Σ_k Ũ_k(y₁)Ũ_k(y₂),
///   σ̃²(y) = σ²(y) − 2C̃(y, y).
class AveragedNoise {
 public:
  AveragedNoise(const GraphModel& model, int count, int first = 0, double tol = 1e-8);

  int size() const { return count_; }
  /// True when every tabulated Ũ_k vanishes identically.
  bool silent() const { return silent_; }
  std::vector<double> U(const GraphState& s) const;
  void U(const GraphState& s, double* out) const;
  double C(const GraphState& a, const GraphState& b) const;
  /// σ̃² at s; negative values within tol·σ² are clamped to 0, larger ones
  /// raise PSDViolation.
  double sigma_tilde2(const GraphState& s) const;
  /// Same, given Ũ(s).
  double sigma_tilde2(const GraphState& s, const double* u) const;

 private:
  const GraphModel* model_;
  int count_, first_;
  double tol_;
  bool silent_ = true;
};

/// C̃(y₁, y₂) as the tensorized double average over the traced orbits through
/// x1 and x2 of ∇H(φ_s x1)ᵀ ½Σ_k U_k(φ_s x1)U_k(φ_u x2)ᵀ ∇H(φ_u x2).
double averaged_covariance(const HamiltonianSystem2D& sys, const NoiseModel& noise, const Vec2& x1, const Vec2& x2,
                           const OrbitOptions& options = {});
/// Same, for graph states, with anchors taken from the graph.
double averaged_covariance(const HamiltonianSystem2D& sys, const MetricGraph& graph, const NoiseModel& noise,
                           const GraphState& y1, const GraphState& y2, const OrbitOptions& options = {});

/// ½ Σ_k μ(U_k·∇H)·μ(U_k·∇H) over the samples of two orbits.
double separable_covariance(const HamiltonianSystem2D& sys, const NoiseModel& noise, const Orbit& o1, const Orbit& o2);
/// The double sum over the samples of two orbits.
double double_covariance(const HamiltonianSystem2D& sys, const NoiseModel& noise, const Orbit& o1, const Orbit& o2);

}  // namespace avlab
