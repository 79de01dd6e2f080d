#include "avlab/reeb/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <set>

#include "avlab/common/error.hpp"
#include "avlab/fields/flow.hpp"
#include "avlab/fields/orbit.hpp"

namespace avlab {

using nlohmann::json;

Vec2 continue_to_level(const HamiltonianSystem2D& sys, const Vec2& x, double h_target) {
  const auto field = [&sys](const Vec2& p) {
    const Vec2 g = sys.grad_H(p);
    const double n2 = g.squaredNorm();
    if (n2 == 0.0) throw Error(ErrorKind::NearCritical, "gradient line reached a critical point");
    return Vec2(g / n2);
  };
  FlowOptions opt;
  opt.tol = 1e-10;
  opt.max_retries = 0;
  const auto flow = make_flow<2>(field, [](const Vec2&) { return Vec<1>(0.0); },
                                 [&sys](const Vec2& p) { return sys.box().contains(p); }, opt);
  Vec2 p = x;
  try {
    p = flow.advance(x, h_target - sys.H(x));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::StepFailure) throw Error(ErrorKind::NearCritical, "gradient continuation stalled");
    throw;
  }
  for (int i = 0; i < 8; ++i) {
    const double r = h_target - sys.H(p);
    if (std::abs(r) <= 1e-15 * (1.0 + std::abs(h_target))) break;
    p += r * field(p);
  }
  return p;
}

Vec2 MetricGraph::anchor(const HamiltonianSystem2D& sys, int id, double h) const {
  const GraphEdge& e = edge(id);
  if (!(h > e.lo && h < e.hi)) throw Error(ErrorKind::InvalidArgument, "level outside the edge interval");
  if (e.anchors.empty()) throw Error(ErrorKind::InvalidArgument, "edge has no anchors");
  const auto best = std::min_element(e.anchors.begin(), e.anchors.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.first - h) < std::abs(b.first - h);
  });
  if (best->first == h) return best->second;
  return continue_to_level(sys, best->second, h);
}

void MetricGraph::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, "graph invariant: " + what); };
  int unbounded = 0, finite_ends = 0, degree_sum = 0;
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const GraphEdge& e = edges[i];
    if (e.id != static_cast<int>(i)) fail("edge ids must be positional");
    if (!(e.lo < e.hi)) fail("empty edge interval");
    if (!e.bounded()) ++unbounded;
    if (e.lo_vertex < 0) fail("lower end without vertex");
    if (e.bounded() != (e.hi_vertex >= 0)) fail("upper end attachment mismatch");
    finite_ends += 1 + (e.bounded() ? 1 : 0);
  }
  if (unbounded > 1) fail("more than one unbounded edge");
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const GraphVertex& vx = vertices[v];
    if (vx.id != static_cast<int>(v)) fail("vertex ids must be positional");
    degree_sum += vx.degree();
    for (const EdgeEnd& end : vx.incident) {
      if (end.edge < 0 || end.edge >= static_cast<int>(edges.size())) fail("dangling incidence");
      if (edges[end.edge].vertex(end.side) != vx.id) fail("incidence disagrees with edge end");
      if (std::abs(edges[end.edge].level(end.side) - vx.level) > 1e-9 * (1 + std::abs(vx.level)))
        fail("edge end level differs from vertex level");
      if (!seen.insert({end.edge, end.side == EndSide::Lower ? 0 : 1}).second) fail("edge end attached twice");
    }
  }
  if (degree_sum != finite_ends) fail("degree sum differs from finite edge ends");
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_inf(const json& j) { return j.is_null() ? kInfinity : j.get<double>(); }

}  // namespace

std::string MetricGraph::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["critical"] = json::array();
  for (const auto& c : critical)
    j["critical"].push_back({{"x", {c.location[0], c.location[1]}},
                             {"value", c.value},
                             {"kind", to_string(c.kind)},
                             {"hessian", {c.hessian(0, 0), c.hessian(0, 1), c.hessian(1, 1)}}});
  j["edges"] = json::array();
  for (const auto& e : edges) {
    json anchors = json::array();
    for (const auto& [h, p] : e.anchors) anchors.push_back({h, p[0], p[1]});
    j["edges"].push_back({{"id", e.id},
                          {"interval", {e.lo, number_or_null(e.hi)}},
                          {"lower_vertex", e.lo_vertex},
                          {"upper_vertex", e.hi_vertex},
                          {"encloses", e.encloses},
                          {"anchors", anchors}});
  }
  j["vertices"] = json::array();
  for (const auto& v : vertices) {
    json inc = json::array();
    for (const auto& end : v.incident) inc.push_back({end.edge, end.side == EndSide::Lower ? "lower" : "upper"});
    j["vertices"].push_back(
        {{"id", v.id}, {"level", v.level}, {"degree", v.degree()}, {"critical", v.critical}, {"incident", inc}});
  }
  return j.dump(2);
}

MetricGraph MetricGraph::from_json(const std::string& text) {
  MetricGraph g;
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != 1) throw Error(ErrorKind::ParseError, "unsupported graph schema version");
    for (const auto& c : j.at("critical")) {
      CriticalPoint cp;
      cp.location = Vec2(c.at("x")[0].get<double>(), c.at("x")[1].get<double>());
      cp.value = c.at("value").get<double>();
      cp.kind = critical_kind_from_string(c.at("kind").get<std::string>());
      const auto& hs = c.at("hessian");
      cp.hessian << hs[0].get<double>(), hs[1].get<double>(), hs[1].get<double>(), hs[2].get<double>();
      g.critical.push_back(cp);
    }
    for (const auto& e : j.at("edges")) {
      GraphEdge ge;
      ge.id = e.at("id").get<int>();
      ge.lo = e.at("interval")[0].get<double>();
      ge.hi = number_or_inf(e.at("interval")[1]);
      ge.lo_vertex = e.at("lower_vertex").get<int>();
      ge.hi_vertex = e.at("upper_vertex").get<int>();
      ge.encloses = e.at("encloses").get<std::vector<int>>();
      for (const auto& a : e.at("anchors"))
        ge.anchors.emplace_back(a[0].get<double>(), Vec2(a[1].get<double>(), a[2].get<double>()));
      g.edges.push_back(ge);
    }
    for (const auto& v : j.at("vertices")) {
      GraphVertex gv;
      gv.id = v.at("id").get<int>();
      gv.level = v.at("level").get<double>();
      gv.critical = v.at("critical").get<std::vector<int>>();
      for (const auto& inc : v.at("incident"))
        gv.incident.push_back({inc[0].get<int>(), inc[1].get<std::string>() == "lower" ? EndSide::Lower : EndSide::Upper});
      g.vertices.push_back(gv);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("graph JSON: ") + e.what());
  }
  g.validate();
  return g;
}

GraphLocation Projection::classify(const Vec2& x) const {
  const MetricGraph& g = *graph_;
  GraphLocation loc;
  loc.h = sys_->H(x);

  const auto vertex_of = [&](int crit) {
    for (const auto& v : g.vertices)
      if (std::find(v.critical.begin(), v.critical.end(), crit) != v.critical.end()) return v.id;
    throw Error(ErrorKind::InvalidArgument, "critical point without vertex");
  };
  const auto nearest_vertex_at_level = [&]() {
    int best = -1;
    double best_d = kInfinity;
    for (std::size_t c = 0; c < g.critical.size(); ++c) {
      const double d = (g.critical[c].location - x).norm() +
                       1e6 * std::abs(g.critical[c].value - loc.h) / (1.0 + std::abs(loc.h));
      if (d < best_d) best_d = d, best = static_cast<int>(c);
    }
    if (best < 0) throw Error(ErrorKind::InvalidArgument, "no vertex for this point");
    return vertex_of(best);
  };

  if (sys_->grad_H(x).norm() < sys_->near_critical_threshold(x)) {
    loc.vertex = nearest_vertex_at_level();
    return loc;
  }
  std::vector<int> candidates;
  for (const auto& e : g.edges)
    if (e.contains(loc.h)) candidates.push_back(e.id);
  if (candidates.size() == 1) {
    loc.edge = candidates.front();
    return loc;
  }
  if (candidates.empty()) {
    for (const auto& v : g.vertices)
      if (std::abs(v.level - loc.h) <= 1e-12 * (1.0 + std::abs(loc.h))) {
        loc.vertex = nearest_vertex_at_level();
        return loc;
      }
    throw Error(ErrorKind::OutOfDomain, "level outside every edge interval");
  }

  OrbitOptions opt;
  opt.tol = 1e-9;
  std::vector<Vec2> loop;
  try {
    loop = orbit_loop(*sys_, x, opt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotClosed && e.kind() != ErrorKind::NearCritical) throw;
    loc.vertex = nearest_vertex_at_level();
    return loc;
  }
  std::vector<int> inside;
  for (std::size_t c = 0; c < g.critical.size(); ++c)
    if (g.critical[c].extremum() && encloses(loop, g.critical[c].location)) inside.push_back(static_cast<int>(c));
  for (int id : candidates)
    if (g.edges[id].encloses == inside) {
      loc.edge = id;
      return loc;
    }
  throw Error(ErrorKind::TopologyAmbiguous, "orbit matches no edge at its level");
}

}  // namespace avlab
