#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "avlab/common/ensemble.hpp"
#include "avlab/common/rng.hpp"
#include "avlab/graphsim/graph_model.hpp"

namespace avlab {

using GraphInitLaw = std::function<GraphState(RandomStream&)>;

struct SimulationParams {
  double dt = 1e-3;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Path i draws its initial state from stream (seed, InitialLaw, i) and its
/// increments from (seed, GraphPath, i); output depends on neither the worker
/// count nor the scheduling order.
Ensemble simulate_graph_paths(const GraphModel& model, const GraphInitLaw& init, const std::vector<double>& times,
                              std::size_t n_paths, const SimulationParams& params);

}  // namespace avlab
