#include "avlab/coeffs/contraction.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "avlab/common/rng.hpp"

namespace avlab {

ContractionCheck form_contraction_check(const HamiltonianSystem2D& sys, const MetricGraph& graph,
                                        const std::vector<EdgeCoefficientTable>& tables, const GraphFunction& f,
                                        const GraphFunction& g, int n_mc, std::uint64_t seed) {
  ContractionCheck out;
  for (const auto& t : tables) {
    const int i = t.edge;
    const auto integrand = [&](double h) {
      const double fp = f.derivative(i, h);
      if (fp == 0.0) return 0.0;
      return 0.5 * t.sigma2T_of(h) * fp * g.derivative(i, h) - t.cT_of(h) * fp * g.value(i, h);
    };
    // Split at the nodes so every panel sees a single cubic.
    for (std::size_t k = 0; k + 1 < t.h.size(); ++k)
      out.lhs += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, t.h[k], t.h[k + 1], 15, 1e-12);
  }

  const Projection proj(sys, graph);
  RandomStream rng(seed, StreamId::MonteCarlo, 0);
  const Box& box = sys.box();
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n_mc; ++k) {
    const Vec2 x(box.lo[0] + rng.uniform() * (box.hi[0] - box.lo[0]),
                 box.lo[1] + rng.uniform() * (box.hi[1] - box.lo[1]));
    const double h = sys.H(x);
    bool active = false;
    for (const auto& e : graph.edges)
      if (e.contains(h) && f.derivative(e.id, h) != 0.0) active = true;
    double val = 0.0;
    if (active) {
      const GraphLocation loc = proj.classify(x);
      if (!loc.on_vertex()) {
        const Vec2 grad = sys.grad_H(x);
        const double fp = f.derivative(loc.edge, h);
        val = sys.nu() * fp * g.derivative(loc.edge, h) * grad.squaredNorm() -
              fp * sys.drift(x).dot(grad) * g.value(loc.edge, h);
      }
    }
    sum += val;
    sum2 += val * val;
  }
  if (n_mc > 0) {
    const double mean = sum / n_mc;
    const double var = n_mc > 1 ? (sum2 - n_mc * mean * mean) / (n_mc - 1) : 0.0;
    out.rhs = box.area() * mean;
    out.mc_stderr = box.area() * std::sqrt(std::max(var, 0.0) / n_mc);
  }
  return out;
}

}  // namespace avlab
