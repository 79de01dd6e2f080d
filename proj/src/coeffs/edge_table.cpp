#include "avlab/coeffs/edge_table.hpp"

#include <algorithm>
#include <math.h>  // pchip.hpp in Boost 1.74 calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <cstdio>

#include "avlab/common/error.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/fields/orbit.hpp"

namespace avlab {

struct MonotoneCubic::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 4) throw Error(ErrorKind::InvalidArgument, "interpolant needs 4+ nodes");
  lo_ = x.front();
  hi_ = x.back();
  impl_ = std::make_shared<Impl>(Impl{boost::math::interpolators::pchip<std::vector<double>>(std::move(x), std::move(y))});
}

double MonotoneCubic::operator()(double x) const { return impl_->spline(std::clamp(x, lo_, hi_)); }
double MonotoneCubic::derivative(double x) const { return impl_->spline.prime(std::clamp(x, lo_, hi_)); }

std::vector<double> edge_grid(double lo, double hi, bool hi_is_truncation, const GridSpec& spec) {
  if (!(hi > lo) || !std::isfinite(hi)) throw Error(ErrorKind::InvalidArgument, "grid needs a finite interval");
  const double L = hi - lo;
  const int ends = hi_is_truncation ? 1 : 2;
  const int n_end = spec.nodes / (2 * ends);
  const int n_mid = spec.nodes - ends * n_end;
  if (n_end < 2 || n_mid < 2) throw Error(ErrorKind::InvalidArgument, "too few grid nodes");
  const double d_min = spec.min_distance * L, d_max = spec.end_zone * L;
  std::vector<double> dist(n_end);
  const double s0 = std::asinh(1.0), s1 = std::asinh(d_max / d_min);
  for (int j = 0; j < n_end; ++j) dist[j] = d_min * std::sinh(s0 + (s1 - s0) * j / (n_end - 1));

  std::vector<double> h;
  for (double d : dist) h.push_back(lo + d);
  if (ends == 2)
    for (double d : dist) h.push_back(hi - d);
  const double m_lo = lo + d_max, m_hi = ends == 2 ? hi - d_max : hi;
  for (int k = 1; k <= n_mid; ++k) {
    const double u = ends == 2 ? static_cast<double>(k) / (n_mid + 1) : static_cast<double>(k) / n_mid;
    h.push_back(m_lo + (m_hi - m_lo) * u);
  }
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return h;
}

LevelCoefficients level_coefficients(const HamiltonianSystem2D& sys, const Vec2& anchor, double tol,
                                     const std::vector<Observable>& extra) {
  OrbitOptions opt;
  opt.tol = tol;
  const Orbit o = trace_orbit(sys, anchor, opt);
  const double nu = sys.nu();
  const double grad2 = orbit_average(o, [&](const Vec2& x) { return sys.grad_H(x).squaredNorm(); });
  const double lap = orbit_average(o, [&](const Vec2& x) { return sys.hess_H(x).trace(); });
  const double drift = orbit_average(o, [&](const Vec2& x) { return sys.drift(x).dot(sys.grad_H(x)); });
  LevelCoefficients lc;
  lc.T = o.period;
  lc.a = o.period * grad2;
  lc.sigma2 = 2.0 * nu * grad2;
  lc.c = drift;
  lc.flux_slope = 2.0 * nu * o.period * lap;
  lc.b = nu * lap + drift;
  for (const auto& g : extra) lc.extra.push_back(orbit_average(o, g));
  return lc;
}

void EdgeCoefficientTable::build_interpolants() {
  std::vector<double> s2T(h.size()), cT(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    s2T[k] = sigma2[k] * T[k];
    cT[k] = c[k] * T[k];
  }
  T_of = MonotoneCubic(h, T);
  sigma2_of = MonotoneCubic(h, sigma2);
  b_of = MonotoneCubic(h, b);
  sigma2T_of = MonotoneCubic(h, s2T);
  cT_of = MonotoneCubic(h, cT);
  extra_of.clear();
  for (const auto& col : extra) extra_of.emplace_back(h, col);
}

double EdgeCoefficientTable::b_by_interpolant(double level) const {
  const double T_here = T_of(level);
  return sigma2T_of.derivative(level) / (2.0 * T_here) + cT_of(level) / T_here;
}

std::string EdgeCoefficientTable::to_csv() const {
  std::string out = "h,T,a,sigma2,c,b";
  for (std::size_t j = 0; j < extra.size(); ++j) out += ",extra" + std::to_string(j);
  out += '\n';
  char buf[64];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    out += buf;
  };
  for (std::size_t k = 0; k < h.size(); ++k) {
    put(h[k], ',');
    put(T[k], ',');
    put(a[k], ',');
    put(sigma2[k], ',');
    put(c[k], ',');
    put(b[k], extra.empty() ? '\n' : ',');
    for (std::size_t j = 0; j < extra.size(); ++j) put(extra[j][k], j + 1 == extra.size() ? '\n' : ',');
  }
  return out;
}

EdgeCoefficientTable tabulate_edge(const HamiltonianSystem2D& sys, const MetricGraph& graph, int edge,
                                   const GridSpec& spec, const std::vector<Observable>& extra) {
  const GraphEdge& e = graph.edge(edge);
  double hi = e.hi;
  if (!e.bounded()) {
    if (!(spec.truncation > e.lo)) throw Error(ErrorKind::InvalidArgument, "unbounded edge needs a truncation level");
    hi = spec.truncation;
  }
  EdgeCoefficientTable t;
  t.edge = edge;
  t.lo = e.lo;
  t.hi = e.hi;
  t.h = edge_grid(e.lo, hi, !e.bounded(), spec);
  const std::size_t n = t.h.size();
  std::vector<LevelCoefficients> rows(n);
  parallel_for(n, spec.threads, [&](std::size_t k) {
    rows[k] = level_coefficients(sys, graph.anchor(sys, edge, t.h[k]), spec.tol, extra);
  });
  t.extra.assign(extra.size(), std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    t.T.push_back(rows[k].T);
    t.a.push_back(rows[k].a);
    t.sigma2.push_back(rows[k].sigma2);
    t.c.push_back(rows[k].c);
    t.b.push_back(rows[k].b);
    t.flux_slope.push_back(rows[k].flux_slope);
    for (std::size_t j = 0; j < extra.size(); ++j) t.extra[j][k] = rows[k].extra[j];
  }
  t.build_interpolants();
  return t;
}

std::vector<EdgeCoefficientTable> tabulate_all(const HamiltonianSystem2D& sys, const MetricGraph& graph,
                                               const GridSpec& spec, const std::vector<Observable>& extra) {
  std::vector<EdgeCoefficientTable> out;
  for (const auto& e : graph.edges) out.push_back(tabulate_edge(sys, graph, e.id, spec, extra));
  return out;
}

}  // namespace avlab
