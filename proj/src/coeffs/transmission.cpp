#include "avlab/coeffs/transmission.hpp"

#include <cmath>
#include <json.hpp>

#include "avlab/common/error.hpp"
#include "avlab/fields/orbit.hpp"

namespace avlab {

double extrapolate_end_weight(const HamiltonianSystem2D& sys, const MetricGraph& graph, const EdgeEnd& end,
                              const TransmissionOptions& options) {
  const GraphEdge& e = graph.edge(end.edge);
  const double level = e.level(end.side);
  const double length = e.bounded() ? e.hi - e.lo : e.anchors.back().first - e.lo;
  const double dir = end.side == EndSide::Lower ? 1.0 : -1.0;
  const double delta = options.window * length;
  OrbitOptions opt;
  opt.tol = options.tol;
  const auto half_sigma2T = [&](double d) {
    const Orbit o = trace_orbit(sys, graph.anchor(sys, e.id, level + dir * d), opt);
    return sys.nu() * o.period * orbit_average(o, [&](const Vec2& x) { return sys.grad_H(x).squaredNorm(); });
  };
  const double g1 = half_sigma2T(delta), g2 = half_sigma2T(delta / 2), g4 = half_sigma2T(delta / 4);
  const double r1 = 2 * g2 - g1, r2 = 2 * g4 - g2;
  const double alpha = (4 * r2 - r1) / 3;
  if (std::abs(r2 - r1) > options.stability * (1.0 + std::abs(alpha)))
    throw Error(ErrorKind::ExtrapolationUnstable, "edge " + std::to_string(e.id) + ": successive extrapolants " +
                                                      std::to_string(r1) + " and " + std::to_string(r2));
  return alpha;
}

std::vector<VertexTransmission> transmission_weights(const HamiltonianSystem2D& sys, const MetricGraph& graph,
                                                     const TransmissionOptions& options) {
  std::vector<VertexTransmission> out;
  for (const auto& v : graph.vertices) {
    VertexTransmission vt;
    vt.vertex = v.id;
    vt.ends = v.incident;
    for (const auto& end : v.incident) vt.weights.push_back(extrapolate_end_weight(sys, graph, end, options));
    if (v.degree() == 1) {
      if (std::abs(vt.weights[0]) > options.eps_alpha)
        throw Error(ErrorKind::NonzeroAtExtremum, "vertex " + std::to_string(v.id) + ": alpha " +
                                                      std::to_string(vt.weights[0]) + " at a degree-1 vertex");
      vt.weights[0] = 0.0;
      vt.probabilities = {1.0};
    } else {
      double total = 0.0;
      for (double& w : vt.weights) {
        if (w < 0) throw Error(ErrorKind::ExtrapolationUnstable, "negative transmission weight");
        total += w;
      }
      for (double w : vt.weights) vt.probabilities.push_back(w / total);
    }
    out.push_back(std::move(vt));
  }
  return out;
}

std::string transmissions_to_json(const std::vector<VertexTransmission>& list) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& vt : list) {
    nlohmann::json ends = nlohmann::json::array();
    for (std::size_t k = 0; k < vt.ends.size(); ++k)
      ends.push_back({{"edge", vt.ends[k].edge},
                      {"side", vt.ends[k].side == EndSide::Lower ? "lower" : "upper"},
                      {"alpha", vt.weights[k]},
                      {"probability", vt.probabilities[k]}});
    j.push_back({{"vertex", vt.vertex}, {"ends", ends}});
  }
  return j.dump(2);
}

}  // namespace avlab
