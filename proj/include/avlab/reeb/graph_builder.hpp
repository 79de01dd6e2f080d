#pragma once

#include <vector>

#include "avlab/fields/hamiltonian.hpp"
#include "avlab/reeb/critical_points.hpp"
#include "avlab/reeb/metric_graph.hpp"

namespace avlab {

struct GraphBuildOptions {
  /// Levels closer than this (relative to the spread of critical values) are merged.
  double merge_tol = 1e-9;
  /// Anchors stored per bounded edge.
  int anchor_count = 9;
};

/// Builds the Reeb graph from the critical points of `sys`.
MetricGraph build_graph(const HamiltonianSystem2D& sys, const std::vector<CriticalPoint>& crit,
                        const GraphBuildOptions& options = {});

/// Largest level whose whole sub-level component structure stays inside the
/// box: the minimum of H over the box boundary.
double box_level(const HamiltonianSystem2D& sys);

/// Truncation level n with e^{λT}(E[H(X0)] + 1)/(n + 1) ≤ p_exit.
double truncation_bound(double growth_rate, double horizon, double mean_initial_h, double p_exit = 1e-4);

}  // namespace avlab
