#include "avlab/coeffs/asymptotics.hpp"

#include <cmath>

#include "avlab/common/error.hpp"

namespace avlab {

AsymptoticFit asymptotic_fit(const EdgeCoefficientTable& table, const MetricGraph& graph, EndSide side,
                             double window) {
  const GraphEdge& e = graph.edge(table.edge);
  const int v = e.vertex(side);
  if (v < 0) throw Error(ErrorKind::InvalidArgument, "edge end has no vertex");
  const double hv = e.level(side);
  const double length = table.range_hi() - table.range_lo();
  std::vector<double> d, T, a;
  for (std::size_t k = 0; k < table.h.size(); ++k) {
    const double dist = std::abs(table.h[k] - hv);
    if (dist <= window * length) {
      d.push_back(dist);
      T.push_back(table.T[k]);
      a.push_back(table.a[k]);
    }
  }
  if (d.size() < 8) throw Error(ErrorKind::WindowTooNarrow, std::to_string(d.size()) + " nodes in the fit window");

  AsymptoticFit fit;
  fit.points = static_cast<int>(d.size());
  double dmin = d[0], dmax = d[0];
  for (double x : d) dmin = std::min(dmin, x), dmax = std::max(dmax, x);
  fit.decades = std::log10(dmax / dmin);
  const double n = static_cast<double>(d.size());

  if (graph.vertex(v).degree() == 1) {
    fit.regime = EndRegime::Extremum;
    double sxy = 0, sxx = 0, mean_a = 0, mean_T = 0;
    for (std::size_t k = 0; k < d.size(); ++k) sxy += d[k] * a[k], sxx += d[k] * d[k], mean_a += a[k], mean_T += T[k];
    mean_a /= n;
    mean_T /= n;
    fit.a_coef = sxy / sxx;
    fit.t_coef = mean_T;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      ss_res += std::pow(a[k] - fit.a_coef * d[k], 2);
      ss_tot += std::pow(a[k] - mean_a, 2);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  } else {
    fit.regime = EndRegime::Saddle;
    double mx = 0, my = 0;
    std::vector<double> x(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) x[k] = std::abs(std::log(d[k])), mx += x[k], my += T[k];
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      sxy += (x[k] - mx) * (T[k] - my);
      sxx += (x[k] - mx) * (x[k] - mx);
      syy += (T[k] - my) * (T[k] - my);
    }
    fit.t_coef = sxy / sxx;
    fit.intercept = my - fit.t_coef * mx;
    fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  }
  return fit;
}

}  // namespace avlab
