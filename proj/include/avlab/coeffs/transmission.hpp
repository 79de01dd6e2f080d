#pragma once

#include <string>
#include <vector>

#include "avlab/coeffs/edge_table.hpp"
#include "avlab/reeb/metric_graph.hpp"

namespace avlab {

struct VertexTransmission {
  int vertex = -1;
  std::vector<EdgeEnd> ends;
  /// α = lim ½σ²T at each end, in the order of `ends`.
  std::vector<double> weights;
  std::vector<double> probabilities;
};

struct TransmissionOptions {
  /// Outer window of the extrapolation, relative to the edge length.
  double window = 1e-5;
  /// Allowed disagreement of successive extrapolants, relative to 1 + |α|.
  double stability = 1e-3;
  /// Largest α accepted at a degree-1 vertex.
  double eps_alpha = 1e-6;
  double tol = 1e-11;
};

/// ½σ²T = ν·a at the end, extrapolated from three nested windows.
double extrapolate_end_weight(const HamiltonianSystem2D& sys, const MetricGraph& graph, const EdgeEnd& end,
                              const TransmissionOptions& options = {});

std::vector<VertexTransmission> transmission_weights(const HamiltonianSystem2D& sys, const MetricGraph& graph,
                                                     const TransmissionOptions& options = {});

std::string transmissions_to_json(const std::vector<VertexTransmission>& list);

}  // namespace avlab
