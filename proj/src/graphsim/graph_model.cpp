#include "avlab/graphsim/graph_model.hpp"

#include <algorithm>
#include <cmath>

#include "avlab/common/error.hpp"

namespace avlab {

GraphModel::GraphModel(MetricGraph graph, std::vector<EdgeCoefficientTable> tables,
                       std::vector<VertexTransmission> transmissions, StepParams params)
    : graph_(std::move(graph)), params_(params) {
  tables_.resize(graph_.edges.size());
  for (auto& t : tables) {
    if (t.edge < 0 || t.edge >= static_cast<int>(tables_.size()))
      throw Error(ErrorKind::InvalidArgument, "table for unknown edge");
    const int id = t.edge;
    tables_[id] = std::move(t);
  }
  for (std::size_t e = 0; e < tables_.size(); ++e)
    if (tables_[e].h.empty()) throw Error(ErrorKind::InvalidArgument, "edge " + std::to_string(e) + " has no table");

  transmissions_.resize(graph_.vertices.size());
  cumulative_.resize(graph_.vertices.size());
  for (auto& vt : transmissions) {
    const int v = vt.vertex;
    if (v < 0 || v >= static_cast<int>(transmissions_.size()))
      throw Error(ErrorKind::InvalidArgument, "transmission for unknown vertex");
    transmissions_[v] = std::move(vt);
  }
  for (const auto& vx : graph_.vertices) {
    const auto& vt = transmissions_[vx.id];
    if (vt.ends.size() != vx.incident.size() || vt.probabilities.size() != vt.ends.size())
      throw Error(ErrorKind::InvalidArgument, "transmission does not match vertex " + std::to_string(vx.id));
    double acc = 0.0;
    for (double p : vt.probabilities) cumulative_[vx.id].push_back(acc += p);
    if (std::abs(acc - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "vertex probabilities do not sum to 1");
    cumulative_[vx.id].back() = 1.0;
  }
}

double GraphModel::top(int edge) const {
  const GraphEdge& e = graph_.edge(edge);
  return e.bounded() ? e.hi : tables_[edge].range_hi();
}

EdgeEnd GraphModel::exit_end(int vertex, RandomStream& rng) const {
  const auto& cum = cumulative_[vertex];
  const double u = rng.uniform();
  const std::size_t k = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
  return transmissions_[vertex].ends[std::min(k, cum.size() - 1)];
}

double GraphModel::local_dt(const GraphState& s, double remaining) const {
  const GraphEdge& e = graph_.edges[s.edge];
  double d = s.h - e.lo;
  if (e.bounded()) d = std::min(d, e.hi - s.h);
  d = std::max(d, 0.0);
  const double s2 = sigma2(s), b = drift(s);
  double dt = remaining;
  if (s2 > 0) dt = std::min(dt, params_.cfl * d * d / s2);
  if (b != 0) dt = std::min(dt, params_.cfl * d / std::abs(b));
  return std::min(std::max(dt, params_.dt_floor), remaining);
}

GraphState GraphModel::move(GraphState s, double dh, RandomStream& rng, StepObserver* observer) const {
  double h = s.h + dh;
  for (int guard = 0; guard < 64; ++guard) {
    const GraphEdge& e = graph_.edges[s.edge];
    int v;
    double excess;
    if (h < e.lo) {
      v = e.lo_vertex;
      excess = e.lo - h;
    } else if (e.bounded() && h > e.hi) {
      v = e.hi_vertex;
      excess = h - e.hi;
    } else if (!e.bounded() && h > tables_[s.edge].range_hi()) {
      throw Error(ErrorKind::CoefficientRangeExceeded, "level " + std::to_string(h) + " beyond the truncation");
    } else {
      s.h = h;
      return s;
    }
    EdgeEnd chosen;
    if (graph_.vertices[v].degree() == 1)
      chosen = graph_.vertices[v].incident.front();
    else
      chosen = exit_end(v, rng);
    if (observer) observer->on_vertex(v, chosen);
    const GraphEdge& next = graph_.edges[chosen.edge];
    s.edge = chosen.edge;
    h = chosen.side == EndSide::Lower ? next.lo + excess : next.hi - excess;
  }
  throw Error(ErrorKind::CoefficientRangeExceeded, "increment too large to resolve at the vertices");
}

GraphState GraphModel::step(GraphState s, double dt, RandomStream& rng, StepObserver* observer) const {
  double remaining = dt;
  while (remaining > 0) {
    const double dtl = local_dt(s, remaining);
    const double dh = drift(s) * dtl + std::sqrt(sigma2(s) * dtl) * rng.normal();
    s = move(s, dh, rng, observer);
    remaining = dtl >= remaining ? 0.0 : remaining - dtl;
    if (observer) observer->on_substep(s);
  }
  return s;
}

}  // namespace avlab
