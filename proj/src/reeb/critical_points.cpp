#include "avlab/reeb/critical_points.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "avlab/common/error.hpp"

namespace avlab {

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::Min: return "min";
    case CriticalKind::Max: return "max";
    case CriticalKind::Saddle: return "saddle";
  }
  return "?";
}

CriticalKind critical_kind_from_string(const std::string& text) {
  if (text == "min") return CriticalKind::Min;
  if (text == "max") return CriticalKind::Max;
  if (text == "saddle") return CriticalKind::Saddle;
  throw Error(ErrorKind::ParseError, "unknown critical kind '" + text + "'");
}

std::vector<CriticalPoint> find_critical_points(const HamiltonianSystem2D& sys, int grid_n) {
  if (grid_n < 16) throw Error(ErrorKind::InvalidArgument, "grid_n must be at least 16");
  const Box& box = sys.box();
  const double diam = box.diameter();
  const double dedup = 1e-6 * diam;
  std::vector<CriticalPoint> found;

  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      Vec2 x(box.lo[0] + (i + 0.5) / grid_n * (box.hi[0] - box.lo[0]),
             box.lo[1] + (j + 0.5) / grid_n * (box.hi[1] - box.lo[1]));
      bool converged = false;
      for (int it = 0; it < 200 && box.contains(x); ++it) {
        const Vec2 g = sys.grad_H(x);
        const Mat2 hs = sys.hess_H(x);
        Eigen::FullPivLU<Mat2> lu(hs);
        if (!lu.isInvertible()) break;
        Vec2 step = lu.solve(g);
        // Damp long jumps so seeds stay near their own basin.
        const double cap = 0.25 * diam;
        if (step.norm() > cap) step *= cap / step.norm();
        x -= step;
        if (step.norm() <= 1e-14 * (1.0 + x.norm())) {
          converged = true;
          break;
        }
      }
      if (!converged || !box.contains(x)) continue;
      const Mat2 hs = sys.hess_H(x);
      if (sys.grad_H(x).norm() > 1e-9 * (1.0 + hs.norm() * diam)) continue;
      if (std::any_of(found.begin(), found.end(), [&](const CriticalPoint& c) { return (c.location - x).norm() < dedup; }))
        continue;
      const double scale = 1.0 + hs.squaredNorm();
      if (std::abs(hs.determinant()) < 1e-8 * scale)
        throw Error(ErrorKind::DegenerateCritical, "degenerate critical point near (" + std::to_string(x[0]) + ", " +
                                                       std::to_string(x[1]) + ")");
      CriticalPoint c;
      c.location = x;
      c.value = sys.H(x);
      c.hessian = hs;
      if (hs.determinant() < 0)
        c.kind = CriticalKind::Saddle;
      else
        c.kind = hs.trace() > 0 ? CriticalKind::Min : CriticalKind::Max;
      found.push_back(c);
    }
  }
  std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.location[0] != b.location[0]) return a.location[0] < b.location[0];
    return a.location[1] < b.location[1];
  });
  return found;
}

}  // namespace avlab
