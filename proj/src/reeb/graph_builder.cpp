#include "avlab/reeb/graph_builder.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

#include "avlab/common/error.hpp"
#include "avlab/fields/orbit.hpp"

namespace avlab {

double box_level(const HamiltonianSystem2D& sys) {
  const Box& b = sys.box();
  constexpr int n = 2000;
  double best = kInfinity;
  for (int k = 0; k <= n; ++k) {
    const double s = static_cast<double>(k) / n;
    const double x = b.lo[0] + s * (b.hi[0] - b.lo[0]), y = b.lo[1] + s * (b.hi[1] - b.lo[1]);
    best = std::min({best, sys.H(Vec2(x, b.lo[1])), sys.H(Vec2(x, b.hi[1])), sys.H(Vec2(b.lo[0], y)),
                     sys.H(Vec2(b.hi[0], y))});
  }
  return best;
}

double truncation_bound(double growth_rate, double horizon, double mean_initial_h, double p_exit) {
  return std::exp(growth_rate * horizon) * (mean_initial_h + 1.0) / p_exit - 1.0;
}

namespace {

struct Component {
  Vec2 anchor;
  std::vector<int> encloses;
};

struct Piece {
  int interval;
  double lo, hi, mid;
  Component comp;
  std::vector<int> lower_adjacent, upper_adjacent;
};

std::vector<int> enclosed_extrema(const std::vector<Vec2>& loop, const std::vector<CriticalPoint>& crit) {
  std::vector<int> out;
  for (std::size_t c = 0; c < crit.size(); ++c)
    if (crit[c].extremum() && encloses(loop, crit[c].location)) out.push_back(static_cast<int>(c));
  return out;
}

// Components of {H = h}: every one of them encloses an extremum, so it meets a
// horizontal or vertical line through some critical point.
std::vector<Component> level_components(const HamiltonianSystem2D& sys, const std::vector<CriticalPoint>& crit,
                                        double h) {
  const Box& box = sys.box();
  std::vector<Component> out;
  OrbitOptions opt;
  opt.tol = 1e-10;
  constexpr int samples = 800;
  for (const auto& c : crit) {
    for (int axis = 0; axis < 2; ++axis) {
      const auto point = [&](double s) {
        Vec2 p = c.location;
        p[axis] = box.lo[axis] + s * (box.hi[axis] - box.lo[axis]);
        return p;
      };
      const auto f = [&](double s) { return sys.H(point(s)) - h; };
      double s_prev = 0.0, f_prev = f(0.0);
      for (int k = 1; k <= samples; ++k) {
        const double s = static_cast<double>(k) / samples, fs = f(s);
        if ((f_prev < 0) != (fs < 0)) {
          std::uintmax_t iters = 200;
          const auto [a, b] = boost::math::tools::toms748_solve(f, s_prev, s, f_prev, fs,
                                                                boost::math::tools::eps_tolerance<double>(52), iters);
          const Vec2 root = point(0.5 * (a + b));
          if (sys.grad_H(root).norm() > 1e3 * sys.near_critical_threshold(root)) {
            std::vector<Vec2> loop;
            try {
              loop = orbit_loop(sys, root, opt);
            } catch (const Error& e) {
              if (e.kind() == ErrorKind::NotClosed)
                throw Error(ErrorKind::NotClosed, "a component of level " + std::to_string(h) +
                                                      " is not closed inside the box");
              throw;
            }
            auto sig = enclosed_extrema(loop, crit);
            const bool known = std::any_of(out.begin(), out.end(), [&](const Component& o) { return o.encloses == sig; });
            if (!known) out.push_back({root, std::move(sig)});
          }
        }
        s_prev = s;
        f_prev = fs;
      }
    }
  }
  return out;
}

double min_distance(const Orbit& o, const Vec2& p) {
  double d = kInfinity;
  for (const auto& x : o.points) d = std::min(d, (x - p).norm());
  return d;
}

// Orbits adjacent to a critical point at level c approach it like √|h − c|.
std::vector<int> adjacent_critical(const HamiltonianSystem2D& sys, const std::vector<CriticalPoint>& crit,
                                   const std::vector<int>& at_level, const Vec2& anchor, double c, double toward,
                                   double eps) {
  OrbitOptions opt;
  opt.tol = 1e-10;
  opt.min_samples = 1024;
  const Vec2 p1 = continue_to_level(sys, anchor, c + toward * eps);
  const Vec2 p2 = continue_to_level(sys, p1, c + toward * eps * 1e-2);
  const Orbit o1 = trace_orbit(sys, p1, opt), o2 = trace_orbit(sys, p2, opt);
  std::vector<int> out;
  for (int idx : at_level) {
    const double d1 = min_distance(o1, crit[idx].location), d2 = min_distance(o2, crit[idx].location);
    if (d2 < 0.3 * d1) out.push_back(idx);
  }
  return out;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

MetricGraph build_graph(const HamiltonianSystem2D& sys, const std::vector<CriticalPoint>& crit,
                        const GraphBuildOptions& options) {
  if (crit.empty()) throw Error(ErrorKind::TopologyAmbiguous, "no critical points in the box");
  const double spread = crit.back().value - crit.front().value;
  std::vector<double> levels;
  std::vector<std::vector<int>> at_level;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    if (levels.empty() || crit[i].value - levels.back() > options.merge_tol * (1.0 + spread)) {
      levels.push_back(crit[i].value);
      at_level.emplace_back();
    }
    at_level.back().push_back(static_cast<int>(i));
  }
  for (int idx : at_level.front())
    if (crit[idx].kind != CriticalKind::Min)
      throw Error(ErrorKind::TopologyAmbiguous, "lowest critical level must consist of minima");

  const int m = static_cast<int>(levels.size());
  const double top_level = box_level(sys);
  if (top_level <= levels.back()) throw Error(ErrorKind::NotClosed, "box too small to contain the critical levels");
  double top_gap = 0.5 * (top_level - levels.back());
  if (m >= 2) top_gap = std::min(top_gap, 0.5 * (levels[m - 1] - levels[m - 2]));

  std::vector<Piece> pieces;
  for (int j = 0; j < m; ++j) {
    const bool top = j == m - 1;
    const double lo = levels[j], hi = top ? kInfinity : levels[j + 1];
    const double mid = top ? lo + top_gap : 0.5 * (lo + hi);
    for (auto& comp : level_components(sys, crit, mid)) pieces.push_back({j, lo, hi, mid, std::move(comp), {}, {}});
  }

  for (auto& p : pieces) {
    const double gap = std::isfinite(p.hi) ? p.hi - p.lo : 2.0 * top_gap;
    const double eps = 1e-3 * gap;
    p.lower_adjacent = adjacent_critical(sys, crit, at_level[p.interval], p.comp.anchor, p.lo, 1.0, eps);
    if (std::isfinite(p.hi))
      p.upper_adjacent = adjacent_critical(sys, crit, at_level[p.interval + 1], p.comp.anchor, p.hi, -1.0, eps);
  }

  // Chain pieces whose boundary touches no critical point into one edge.
  std::vector<int> next(pieces.size(), -1), prev(pieces.size(), -1);
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    if (!std::isfinite(pieces[a].hi) || !pieces[a].upper_adjacent.empty()) continue;
    int match = -1;
    for (std::size_t b = 0; b < pieces.size(); ++b)
      if (pieces[b].interval == pieces[a].interval + 1 && pieces[b].lower_adjacent.empty() &&
          pieces[b].comp.encloses == pieces[a].comp.encloses) {
        if (match >= 0) throw Error(ErrorKind::TopologyAmbiguous, "two continuations across a critical level");
        match = static_cast<int>(b);
      }
    if (match < 0) throw Error(ErrorKind::TopologyAmbiguous, "orbit family has no continuation across a critical level");
    next[a] = match;
    prev[match] = static_cast<int>(a);
  }

  struct Chain {
    std::vector<int> pieces;
  };
  std::vector<Chain> chains;
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    if (prev[a] >= 0) continue;
    Chain ch;
    for (int k = static_cast<int>(a); k >= 0; k = next[k]) ch.pieces.push_back(k);
    chains.push_back(std::move(ch));
  }
  std::sort(chains.begin(), chains.end(), [&](const Chain& x, const Chain& y) {
    const Piece &px = pieces[x.pieces.front()], &py = pieces[y.pieces.front()];
    if (px.lo != py.lo) return px.lo < py.lo;
    return px.comp.encloses < py.comp.encloses;
  });

  MetricGraph g;
  g.critical = crit;
  std::vector<int> parent(crit.size());
  std::iota(parent.begin(), parent.end(), 0);
  struct EndAdjacency {
    EdgeEnd end;
    std::vector<int> crit;
  };
  std::vector<EndAdjacency> ends;
  for (const Chain& ch : chains) {
    const Piece &first = pieces[ch.pieces.front()], &last = pieces[ch.pieces.back()];
    GraphEdge e;
    e.id = static_cast<int>(g.edges.size());
    e.lo = first.lo;
    e.hi = last.hi;
    e.encloses = first.comp.encloses;
    std::vector<std::pair<double, Vec2>> seeds;
    for (int k : ch.pieces) seeds.emplace_back(pieces[k].mid, pieces[k].comp.anchor);
    const double hi_eff = e.bounded() ? e.hi : top_level;
    for (int k = 1; k <= options.anchor_count; ++k) {
      const double h = e.lo + (hi_eff - e.lo) * k / (options.anchor_count + 1);
      const auto seed = std::min_element(seeds.begin(), seeds.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.first - h) < std::abs(b.first - h);
      });
      e.anchors.emplace_back(h, continue_to_level(sys, seed->second, h));
    }
    for (const auto& s : seeds) e.anchors.push_back(s);
    std::sort(e.anchors.begin(), e.anchors.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    ends.push_back({{e.id, EndSide::Lower}, first.lower_adjacent});
    if (e.bounded()) ends.push_back({{e.id, EndSide::Upper}, last.upper_adjacent});
    g.edges.push_back(std::move(e));
  }

  for (const auto& ea : ends) {
    if (ea.crit.empty()) throw Error(ErrorKind::TopologyAmbiguous, "edge end approaches no critical point");
    for (std::size_t k = 1; k < ea.crit.size(); ++k) parent[find_root(parent, ea.crit[k])] = find_root(parent, ea.crit[0]);
  }
  std::map<int, int> vertex_of_root;
  for (std::size_t c = 0; c < crit.size(); ++c) {
    const int r = find_root(parent, static_cast<int>(c));
    auto it = vertex_of_root.find(r);
    if (it == vertex_of_root.end()) {
      it = vertex_of_root.emplace(r, static_cast<int>(g.vertices.size())).first;
      GraphVertex v;
      v.id = it->second;
      v.level = crit[c].value;
      g.vertices.push_back(v);
    }
    g.vertices[it->second].critical.push_back(static_cast<int>(c));
  }
  for (const auto& ea : ends) {
    const int v = vertex_of_root.at(find_root(parent, ea.crit.front()));
    GraphEdge& e = g.edges[ea.end.edge];
    (ea.end.side == EndSide::Lower ? e.lo_vertex : e.hi_vertex) = v;
    g.vertices[v].level = e.level(ea.end.side);
    g.vertices[v].incident.push_back(ea.end);
  }
  for (const auto& v : g.vertices)
    if (v.incident.empty()) throw Error(ErrorKind::TopologyAmbiguous, "critical point not adjacent to any edge");
  g.validate();
  return g;
}

}  // namespace avlab
