#include "avlab/graphsim/graph_simulator.hpp"

#include <cmath>

#include "avlab/common/parallel.hpp"

namespace avlab {

Ensemble simulate_graph_paths(const GraphModel& model, const GraphInitLaw& init, const std::vector<double>& times,
                              std::size_t n_paths, const SimulationParams& params) {
  Ensemble ens;
  ens.kind = PathKind::Graph;
  ens.times = times;
  ens.paths.resize(n_paths);
  parallel_for(n_paths, params.threads, [&](std::size_t i) {
    RandomStream init_rng(params.seed, StreamId::InitialLaw, i);
    RandomStream rng(params.seed, StreamId::GraphPath, i);
    PathRecord& rec = ens.paths[i];
    rec.resize(times.size());
    try {
      GraphState s = init(init_rng);
      double t = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double span = times[k] - t;
        if (span > 0) {
          const long n = std::max(1L, static_cast<long>(std::ceil(span / params.dt - 1e-9)));
          for (long j = 0; j < n; ++j) s = model.step(s, span / n, rng);
          t = times[k];
        }
        rec.label[k] = s.edge;
        rec.c1[k] = s.h;
      }
    } catch (const Error& e) {
      rec.mark(e.kind());
    }
  });
  return ens;
}

}  // namespace avlab
