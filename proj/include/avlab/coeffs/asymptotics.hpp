#pragma once

#include <string>

#include "avlab/coeffs/edge_table.hpp"
#include "avlab/reeb/metric_graph.hpp"

namespace avlab {

enum class EndRegime { Extremum, Saddle };

struct AsymptoticFit {
  EndRegime regime = EndRegime::Extremum;
  /// Extremum: a ≈ a_coef·|h − h_v|. Saddle: unused.
  double a_coef = 0.0;
  /// Extremum: T ≈ t_coef. Saddle: T ≈ t_coef·|log|h − h_v|| + intercept.
  double t_coef = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
  double decades = 0.0;
};

/// Fits the endpoint asymptotics on nodes with |h − h_v| ≤ window·(edge length).
AsymptoticFit asymptotic_fit(const EdgeCoefficientTable& table, const MetricGraph& graph, EndSide side,
                             double window = 0.01);

}  // namespace avlab
