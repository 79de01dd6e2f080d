#include "avlab/flows/averaged_noise.hpp"

#include <cmath>

#include "avlab/common/error.hpp"

namespace avlab {

std::vector<Observable> noise_observables(const HamiltonianSystem2D& sys, const NoiseModel& noise) {
  std::vector<Observable> out;
  for (int k = 0; k < noise.size(); ++k)
    out.push_back([&sys, noise, k](const Vec2& x) { return noise.field(k, x).dot(sys.grad_H(x)); });
  return out;
}

AveragedNoise::AveragedNoise(const GraphModel& model, int count, int first, double tol)
    : model_(&model), count_(count), first_(first), tol_(tol) {
  for (const auto& e : model.graph().edges)
    if (static_cast<int>(model.table(e.id).extra_of.size()) < first + count)
      throw Error(ErrorKind::InvalidArgument, "edge table lacks the averaged noise columns");
  for (const auto& e : model.graph().edges)
    for (int k = 0; k < count; ++k)
      for (double v : model.table(e.id).extra[first + k]) silent_ = silent_ && v == 0.0;
}

std::vector<double> AveragedNoise::U(const GraphState& s) const {
  std::vector<double> u(count_);
  U(s, u.data());
  return u;
}

void AveragedNoise::U(const GraphState& s, double* out) const {
  const auto& t = model_->table(s.edge);
  for (int k = 0; k < count_; ++k) out[k] = t.extra_of[first_ + k](s.h);
}

double AveragedNoise::C(const GraphState& a, const GraphState& b) const {
  const auto ua = U(a), ub = U(b);
  double c = 0.0;
  for (int k = 0; k < count_; ++k) c += ua[k] * ub[k];
  return 0.5 * c;
}

double AveragedNoise::sigma_tilde2(const GraphState& s) const { return sigma_tilde2(s, U(s).data()); }

double AveragedNoise::sigma_tilde2(const GraphState& s, const double* u) const {
  double uu = 0.0;
  for (int k = 0; k < count_; ++k) uu += u[k] * u[k];
  const double s2 = model_->sigma2(s);
  const double v = s2 - uu;
  if (v >= 0.0) return v;
  if (v < -tol_ * s2) throw Error(ErrorKind::PSDViolation, "averaged common noise exceeds the diffusion rate");
  return 0.0;
}

double separable_covariance(const HamiltonianSystem2D& sys, const NoiseModel& noise, const Orbit& o1, const Orbit& o2) {
  double c = 0.0;
  for (int k = 0; k < noise.size(); ++k) {
    const auto u = [&](const Vec2& x) { return noise.field(k, x).dot(sys.grad_H(x)); };
    c += orbit_average(o1, u) * orbit_average(o2, u);
  }
  return 0.5 * c;
}

double double_covariance(const HamiltonianSystem2D& sys, const NoiseModel& noise, const Orbit& o1, const Orbit& o2) {
  std::vector<Vec2> g1(o1.size()), g2(o2.size());
  for (std::size_t i = 0; i < o1.size(); ++i) g1[i] = sys.grad_H(o1.points[i]);
  for (std::size_t j = 0; j < o2.size(); ++j) g2[j] = sys.grad_H(o2.points[j]);
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < o1.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < o2.size(); ++j)
      row += g1[i].dot(noise.rate(o1.points[i], o2.points[j]) * g2[j]);
    const double y = row / static_cast<double>(o2.size()) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return 0.5 * sum / static_cast<double>(o1.size());
}

double averaged_covariance(const HamiltonianSystem2D& sys, const NoiseModel& noise, const Vec2& x1, const Vec2& x2,
                           const OrbitOptions& options) {
  const Orbit o1 = trace_orbit(sys, x1, options);
  const Orbit o2 = trace_orbit(sys, x2, options);
  return double_covariance(sys, noise, o1, o2);
}

double averaged_covariance(const HamiltonianSystem2D& sys, const MetricGraph& graph, const NoiseModel& noise,
                           const GraphState& y1, const GraphState& y2, const OrbitOptions& options) {
  for (const auto* y : {&y1, &y2})
    if (!graph.edge(y->edge).contains(y->h)) throw Error(ErrorKind::InvalidArgument, "state not in an edge interior");
  return averaged_covariance(sys, noise, graph.anchor(sys, y1.edge, y1.h), graph.anchor(sys, y2.edge, y2.h), options);
}

}  // namespace avlab
