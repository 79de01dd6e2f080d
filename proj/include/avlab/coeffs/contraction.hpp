#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "avlab/coeffs/edge_table.hpp"
#include "avlab/reeb/metric_graph.hpp"

namespace avlab {

/// Edge-wise C¹ function on the graph: value(edge, h), derivative(edge, h).
struct GraphFunction {
  std::function<double(int, double)> value;
  std::function<double(int, double)> derivative;
};

struct ContractionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double mc_stderr = 0.0;
};

/// Graph-side form ½Σ∫σ²f'g'T dh − Σ∫c f'g T dh against a Monte-Carlo
/// estimate of ∫Γ(f∘π, g∘π)dx − ∫V0(f∘π)·(g∘π)dx over the box.
ContractionCheck form_contraction_check(const HamiltonianSystem2D& sys, const MetricGraph& graph,
                                        const std::vector<EdgeCoefficientTable>& tables, const GraphFunction& f,
                                        const GraphFunction& g, int n_mc, std::uint64_t seed);

}  // namespace avlab
