#pragma once

#include <cstdint>
#include <vector>

#include "avlab/common/error.hpp"

namespace avlab {

enum class PathKind : std::uint32_t {
  Graph = 1,
  AmbientProjected = 2,
  Book = 3,
  AmbientBook = 4,
};

/// One path observed on a time grid. Graph-valued states store the edge id
/// as label and h as c1; vertex states use label −1 − vertex. Book states
/// store the page as label and (r, θ) as (c1, c2).
struct PathRecord {
  std::vector<std::int32_t> label;
  std::vector<double> c1, c2;
  /// 0 for a clean path, otherwise 1 + the ErrorKind that stopped it.
  std::uint8_t flag = 0;

  bool ok() const { return flag == 0; }
  void resize(std::size_t n) {
    label.assign(n, 0);
    c1.assign(n, 0.0);
    c2.assign(n, 0.0);
  }
  void mark(ErrorKind kind) { flag = static_cast<std::uint8_t>(1 + static_cast<int>(kind)); }
};

struct Ensemble {
  PathKind kind = PathKind::Graph;
  std::vector<double> times;
  std::vector<PathRecord> paths;

  std::size_t flagged() const {
    std::size_t n = 0;
    for (const auto& p : paths) n += p.ok() ? 0 : 1;
    return n;
  }
};

}  // namespace avlab
