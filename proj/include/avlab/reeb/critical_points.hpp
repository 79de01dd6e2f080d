#pragma once

#include <string>
#include <vector>

#include "avlab/common/types.hpp"
#include "avlab/fields/hamiltonian.hpp"

namespace avlab {

enum class CriticalKind { Min, Max, Saddle };

std::string to_string(CriticalKind kind);
CriticalKind critical_kind_from_string(const std::string& text);

struct CriticalPoint {
  Vec2 location;
  double value = 0.0;
  CriticalKind kind = CriticalKind::Min;
  Mat2 hessian = Mat2::Zero();

  bool extremum() const { return kind != CriticalKind::Saddle; }
};

/// Newton's method on ∇H = 0 from a grid_n × grid_n seed grid over the box.
/// Results are deduplicated and sorted by (value, x1, x2).
std::vector<CriticalPoint> find_critical_points(const HamiltonianSystem2D& sys, int grid_n = 32);

}  // namespace avlab
