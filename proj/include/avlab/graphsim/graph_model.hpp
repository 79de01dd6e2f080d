#pragma once

#include <vector>

#include "avlab/coeffs/edge_table.hpp"
#include "avlab/coeffs/transmission.hpp"
#include "avlab/common/rng.hpp"
#include "avlab/reeb/metric_graph.hpp"

namespace avlab {

struct GraphState {
  int edge = -1;
  double h = 0.0;
};

struct StepParams {
  /// Local step bound: dt_loc ≤ cfl·d²/σ² and ≤ cfl·d/|b|, d the distance to
  /// the nearest finite edge end.
  double cfl = 0.5;
  double dt_floor = 1e-7;
};

/// Receives every interior substep and every vertex crossing.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_substep(const GraphState&) {}
  virtual void on_vertex(int /*vertex*/, const EdgeEnd& /*chosen*/) {}
};

/// The limiting diffusion on the metric graph: ½σ²f'' + bf' on each edge,
/// gluing at vertices weighted by α, entrance behaviour at degree-1 ends.
class GraphModel {
 public:
  GraphModel(MetricGraph graph, std::vector<EdgeCoefficientTable> tables, std::vector<VertexTransmission> transmissions,
             StepParams params = {});

  const MetricGraph& graph() const { return graph_; }
  const EdgeCoefficientTable& table(int edge) const { return tables_.at(edge); }
  const VertexTransmission& transmission(int vertex) const { return transmissions_.at(vertex); }
  const StepParams& params() const { return params_; }

  double sigma2(const GraphState& s) const { return tables_[s.edge].sigma2_of(s.h); }
  double drift(const GraphState& s) const { return tables_[s.edge].b_of(s.h); }
  /// Upper level of the simulated part of `edge` (its truncation if unbounded).
  double top(int edge) const;

  /// Draws an incident edge end at `vertex` with probability α/Σα.
  EdgeEnd exit_end(int vertex, RandomStream& rng) const;

  /// Advances by dt with local substepping. Throws CoefficientRangeExceeded
  /// past the truncation of the unbounded edge.
  GraphState step(GraphState s, double dt, RandomStream& rng, StepObserver* observer = nullptr) const;

  /// Applies the increment dh to the level and resolves vertex crossings:
  /// folding at degree-1 ends, α-weighted edge choice elsewhere, the excess
  /// carried into the chosen edge.
  GraphState move(GraphState s, double dh, RandomStream& rng, StepObserver* observer = nullptr) const;

  /// Largest admissible substep at s, capped by `remaining`.
  double local_dt(const GraphState& s, double remaining) const;

 private:
  MetricGraph graph_;
  std::vector<EdgeCoefficientTable> tables_;
  std::vector<VertexTransmission> transmissions_;
  std::vector<std::vector<double>> cumulative_;
  StepParams params_;
};

}  // namespace avlab
