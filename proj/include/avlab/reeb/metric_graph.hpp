#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "avlab/common/types.hpp"
#include "avlab/fields/hamiltonian.hpp"
#include "avlab/reeb/critical_points.hpp"

namespace avlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Lower ends are where H increases into the edge, upper ends where it leaves.
enum class EndSide { Lower, Upper };

struct EdgeEnd {
  int edge = -1;
  EndSide side = EndSide::Lower;
  bool operator==(const EdgeEnd&) const = default;
};

struct GraphEdge {
  int id = -1;
  double lo = 0.0;
  double hi = kInfinity;
  int lo_vertex = -1;
  int hi_vertex = -1;
  /// Critical points (indices into MetricGraph::critical) of extremum kind
  /// enclosed by every orbit of the edge.
  std::vector<int> encloses;
  /// Points on the edge at increasing levels, used to seed anchors.
  std::vector<std::pair<double, Vec2>> anchors;

  bool bounded() const { return hi < kInfinity; }
  bool contains(double h) const { return h > lo && h < hi; }
  int vertex(EndSide side) const { return side == EndSide::Lower ? lo_vertex : hi_vertex; }
  double level(EndSide side) const { return side == EndSide::Lower ? lo : hi; }
};

struct GraphVertex {
  int id = -1;
  double level = 0.0;
  std::vector<int> critical;
  std::vector<EdgeEnd> incident;

  int degree() const { return static_cast<int>(incident.size()); }
};

struct GraphLocation {
  /// Exactly one of edge / vertex is ≥ 0.
  int edge = -1;
  int vertex = -1;
  double h = 0.0;

  bool on_vertex() const { return vertex >= 0; }
};

/// The Reeb graph of H on the box: edges are families of closed orbits,
/// vertices are connected components of critical level sets.
class MetricGraph {
 public:
  std::vector<CriticalPoint> critical;
  std::vector<GraphEdge> edges;
  std::vector<GraphVertex> vertices;

  const GraphEdge& edge(int id) const { return edges.at(id); }
  const GraphVertex& vertex(int id) const { return vertices.at(id); }

  /// A point of edge `id` at level h, continued along the gradient from the
  /// nearest stored anchor.
  Vec2 anchor(const HamiltonianSystem2D& sys, int id, double h) const;

  /// Throws InvalidArgument with a description when a structural invariant fails.
  void validate() const;

  std::string to_json() const;
  static MetricGraph from_json(const std::string& text);
};

/// Moves x along ∇H/|∇H|² to the level h_target and polishes with Newton.
Vec2 continue_to_level(const HamiltonianSystem2D& sys, const Vec2& x, double h_target);

/// π(x) = (H(x), component of the level set through x).
class Projection {
 public:
  Projection(const HamiltonianSystem2D& sys, const MetricGraph& graph) : sys_(&sys), graph_(&graph) {}

  GraphLocation classify(const Vec2& x) const;
  const MetricGraph& graph() const { return *graph_; }

 private:
  const HamiltonianSystem2D* sys_;
  const MetricGraph* graph_;
};

}  // namespace avlab
