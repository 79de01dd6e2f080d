#include "avlab/flows/noise.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "avlab/common/error.hpp"
#include "avlab/common/rng.hpp"

namespace avlab {

NoiseModel::NoiseModel(std::vector<NoiseMode> modes, double delta) : modes_(std::move(modes)), delta_(delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1]");
  for (const auto& m : modes_)
    if (!std::isfinite(m.amplitude) || !m.omega.allFinite() || !m.direction.allFinite())
      throw Error(ErrorKind::InvalidArgument, "non-finite noise mode");
}

NoiseModel NoiseModel::fourier(const FourierPreset& p) {
  if (p.modes < 1) throw Error(ErrorKind::InvalidArgument, "need at least one mode");
  if (!(p.k_min > 0.0 && p.k_max >= p.k_min)) throw Error(ErrorKind::InvalidArgument, "bad wavenumber range");
  RandomStream rng(p.seed, StreamId::NoisePreset, 0);
  std::vector<NoiseMode> modes(p.modes);
  const double a = p.amplitude / std::sqrt(static_cast<double>(p.modes));
  for (auto& m : modes) {
    const double k = p.k_min + (p.k_max - p.k_min) * rng.uniform();
    const double angle = 2.0 * M_PI * rng.uniform();
    m.amplitude = a;
    m.omega = k * Vec2(std::cos(angle), std::sin(angle));
    m.phase = 2.0 * M_PI * rng.uniform();
    m.direction = p.compressible ? Vec2(std::cos(angle), std::sin(angle)) : Vec2(-std::sin(angle), std::cos(angle));
  }
  return NoiseModel(std::move(modes), p.delta);
}

NoiseModel NoiseModel::constant(const Vec2& direction, double amplitude, double delta) {
  NoiseMode m;
  m.amplitude = amplitude;
  m.direction = direction.normalized();
  return NoiseModel({m}, delta);
}

double NoiseModel::max_amplitude(double nu, double delta) { return std::sqrt((1.0 - delta) * 2.0 * nu); }

bool NoiseModel::silent() const {
  return std::all_of(modes_.begin(), modes_.end(), [](const NoiseMode& m) { return m.amplitude == 0.0; });
}

Vec2 NoiseModel::field(int k, const Vec2& x) const {
  const auto& m = modes_[k];
  return m.amplitude * std::cos(m.omega.dot(x) + m.phase) * m.direction;
}

Mat2 NoiseModel::jacobian(int k, const Vec2& x) const {
  const auto& m = modes_[k];
  return -m.amplitude * std::sin(m.omega.dot(x) + m.phase) * m.direction * m.omega.transpose();
}

Mat2 NoiseModel::rate(const Vec2& x, const Vec2& y) const {
  Mat2 c = Mat2::Zero();
  for (int k = 0; k < size(); ++k) c += field(k, x) * field(k, y).transpose();
  return c;
}

Vec2 NoiseModel::ito_correction(const Vec2& x) const {
  Vec2 d = Vec2::Zero();
  for (int k = 0; k < size(); ++k) d += jacobian(k, x) * field(k, x);
  return 0.5 * d;
}

std::vector<double> NoiseModel::along_gradient(const HamiltonianSystem2D& sys, const Vec2& x) const {
  const Vec2 g = sys.grad_H(x);
  std::vector<double> out(size());
  for (int k = 0; k < size(); ++k) out[k] = field(k, x).dot(g);
  return out;
}

double NoiseModel::check_pure_diffusion(double nu, const Box& box, int n, double tol) const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x(box.lo[0] + (box.hi[0] - box.lo[0]) * i / (n - 1), box.lo[1] + (box.hi[1] - box.lo[1]) * j / (n - 1));
      const Mat2 c = rate(x, x);
      if ((c - c.transpose()).cwiseAbs().maxCoeff() > tol) throw Error(ErrorKind::PSDViolation, "asymmetric noise rate");
      const Eigen::SelfAdjointEigenSolver<Mat2> es(c);
      if (es.eigenvalues()[0] < -tol) throw Error(ErrorKind::PSDViolation, "noise rate not positive semidefinite");
      worst = std::max(worst, es.eigenvalues()[1] / (2.0 * nu));
    }
  if (worst > 1.0 - delta_ + tol)
    throw Error(ErrorKind::PSDViolation, "common noise exceeds the pure-diffusion margin: " + std::to_string(worst));
  return worst;
}

}  // namespace avlab
