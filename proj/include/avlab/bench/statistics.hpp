#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "avlab/common/ensemble.hpp"

namespace avlab {

struct KsResult {
  double statistic = 0.0;
  double threshold_99 = 0.0;
  bool below() const { return statistic < threshold_99; }
};

/// Asymptotic two-sample 99% critical value √(−ln(0.005)/2)·√((n+m)/(nm)).
double ks_threshold_99(std::size_t n, std::size_t m);

KsResult ks_distance(std::span<const double> a, std::span<const double> b);
double wasserstein1(std::span<const double> a, std::span<const double> b);
double total_variation(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

struct Summary {
  std::size_t n = 0;
  double mean = 0, stderr_mean = 0, q05 = 0, q50 = 0, q95 = 0;
};

Summary summarize(std::span<const double> x);

enum class Coordinate { First, Second };

/// Samples of one ensemble on its time grid, flagged paths dropped at every
/// time.
class EmpiricalLaw {
 public:
  EmpiricalLaw() = default;
  static EmpiricalLaw from_ensemble(const Ensemble& ens, Coordinate coord = Coordinate::First);

  std::string observable;
  std::vector<double> times;
  std::size_t excluded = 0;

  std::size_t size() const { return values_.empty() ? 0 : values_.front().size(); }
  std::span<const double> values(std::size_t k) const { return values_.at(k); }
  std::span<const std::int32_t> labels(std::size_t k) const { return labels_.at(k); }
  /// Values at time k restricted to one label.
  std::vector<double> values_with_label(std::size_t k, std::int32_t label) const;
  Summary summary(std::size_t k) const { return summarize(values(k)); }

 private:
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::int32_t>> labels_;
};

KsResult ks_distance(const EmpiricalLaw& a, const EmpiricalLaw& b, std::size_t k);
double wasserstein1(const EmpiricalLaw& a, const EmpiricalLaw& b, std::size_t k);

/// Distance between laws on a glued state space: TV of the label marginal,
/// and per-label KS of the coordinate weighted by the mean label mass.
struct GraphDistance {
  double tv = 0.0;
  double weighted_ks = 0.0;
  double combined = 0.0;
  std::map<std::int32_t, KsResult> per_label;
};

GraphDistance graph_distance(const EmpiricalLaw& a, const EmpiricalLaw& b, std::size_t k);

}  // namespace avlab
