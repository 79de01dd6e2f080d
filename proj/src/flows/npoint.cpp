#include "avlab/flows/npoint.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "avlab/common/error.hpp"
#include "avlab/common/parallel.hpp"

namespace avlab {

namespace {

std::vector<double> common_increments(int k, double tau, RandomStream& common) {
  const double s = std::sqrt(tau);
  std::vector<double> dw(k);
  for (auto& w : dw) w = s * common.normal();
  return dw;
}

std::vector<RandomStream> particle_streams(std::uint64_t seed, StreamId id, std::size_t sample, std::size_t n) {
  std::vector<RandomStream> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.emplace_back(seed, id, sample * n + j);
  return out;
}

NPointEnsemble empty_ensemble(std::size_t n, PathKind kind, const std::vector<double>& times, std::size_t samples) {
  NPointEnsemble out;
  out.particles.resize(n);
  for (auto& e : out.particles) {
    e.kind = kind;
    e.times = times;
    e.paths.resize(samples);
    for (auto& p : e.paths) p.resize(times.size());
  }
  return out;
}

void mark_sample(NPointEnsemble& ens, std::size_t i, ErrorKind kind) {
  for (auto& e : ens.particles) e.paths[i].mark(kind);
}

}  // namespace

AmbientNPoint::AmbientNPoint(const HamiltonianSystem2D& sys, NoiseModel noise, AmbientConfig cfg, double psd_tol)
    : sys_(&sys), noise_(std::move(noise)), sim_(planar_dynamics(sys), cfg), psd_tol_(psd_tol) {}

Vec2 AmbientNPoint::diffuse(const Vec2& x, double tau, const std::vector<double>& dw, RandomStream& rng) const {
  Vec2 xi;
  xi[0] = rng.normal();
  xi[1] = rng.normal();
  const double nu = sys_->nu();
  const double scale = std::sqrt(2.0 * nu * tau);
  const Mat2 m = noise_.rate(x, x);
  Vec2 own;
  if (m.isZero(0.0)) {
    own = xi * scale;
  } else {
    const Eigen::SelfAdjointEigenSolver<Mat2> es(Mat2::Identity() - m / (2.0 * nu));
    const Vec2 ev = es.eigenvalues();
    if (ev[0] < -psd_tol_) throw Error(ErrorKind::PSDViolation, "common noise exceeds the diffusivity at a visited point");
    const Vec2 root = ev.cwiseMax(0.0).cwiseSqrt();
    own = (es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose()) * xi * scale;
  }
  Vec2 shared = Vec2::Zero();
  for (int k = 0; k < noise_.size(); ++k) shared += noise_.field(k, x) * dw[k];
  return sim_.diffuse(x, tau, own + shared);
}

std::vector<Vec2> AmbientNPoint::step(std::vector<Vec2> xs, double dt, RandomStream& common,
                                      std::vector<RandomStream>& rngs) const {
  if (rngs.size() != xs.size()) throw Error(ErrorKind::InvalidArgument, "one stream per particle");
  const double half = 0.5 * dt;
  const auto dw1 = common_increments(noise_.size(), half, common);
  const auto dw2 = common_increments(noise_.size(), half, common);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    Vec2 y = diffuse(xs[j], half, dw1, rngs[j]);
    y = sim_.shear_flow(y, dt);
    y = diffuse(y, half, dw2, rngs[j]);
    if (!sim_.dynamics().domain(y)) throw Error(ErrorKind::OutOfDomain, "ambient particle left the domain");
    xs[j] = y;
  }
  return xs;
}

std::vector<Vec2> AmbientNPoint::advance(std::vector<Vec2> xs, double span, RandomStream& common,
                                         std::vector<RandomStream>& rngs) const {
  if (span <= 0) return xs;
  const auto& cfg = sim_.config();
  const long n = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));
  for (long j = 0; j < n; ++j) {
    xs = step(std::move(xs), span / n, common, rngs);
    for (const auto& x : xs)
      if (sim_.dynamics().level(x) > cfg.h_max) throw Error(ErrorKind::CoefficientRangeExceeded, "level above truncation");
  }
  return xs;
}

NPointEnsemble AmbientNPoint::simulate(const Projection& proj, const std::vector<AmbientInitLaw<2>>& inits,
                                       const std::vector<double>& times, std::size_t n_samples, std::uint64_t seed,
                                       unsigned threads) const {
  const std::size_t n = inits.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "no particles");
  NPointEnsemble ens = empty_ensemble(n, PathKind::AmbientProjected, times, n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    RandomStream common(seed, StreamId::CommonNoise, i);
    auto init_rngs = particle_streams(seed, StreamId::InitialLaw, i, n);
    auto rngs = particle_streams(seed, StreamId::AmbientPath, i, n);
    try {
      std::vector<Vec2> xs(n);
      for (std::size_t j = 0; j < n; ++j) xs[j] = inits[j](init_rngs[j]);
      double t = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        xs = advance(std::move(xs), times[k] - t, common, rngs);
        t = std::max(t, times[k]);
        for (std::size_t j = 0; j < n; ++j) {
          auto& rec = ens.particles[j].paths[i];
          encode_location(proj.classify(xs[j]), rec.label[k], rec.c1[k]);
        }
      }
    } catch (const Error& e) {
      mark_sample(ens, i, e.kind());
    }
  });
  return ens;
}

std::vector<Vec2> npoint_ambient_step(const HamiltonianSystem2D& sys, const NoiseModel& noise,
                                      const AmbientConfig& cfg, const std::vector<Vec2>& xs, double dt,
                                      RandomStream& common, std::vector<RandomStream>& rngs) {
  for (const auto& x : xs)
    if (!sys.box().contains(x)) throw Error(ErrorKind::OutOfDomain, "start point outside the domain");
  return AmbientNPoint(sys, noise, cfg).step(xs, dt, common, rngs);
}

CovarianceRoot factorize_covariance(const Eigen::MatrixXd& sigma, double tol) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = 1.0 + sigma.cwiseAbs().maxCoeff();
  CovarianceRoot out;
  out.clamped = std::max(0.0, -ev.minCoeff());
  if (out.clamped > tol * scale) throw Error(ErrorKind::PSDViolation, "step covariance has a negative eigenvalue");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  out.root = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return out;
}

GraphNPoint::GraphNPoint(const GraphModel& model, AveragedNoise noise, double clamp_tol)
    : model_(&model), noise_(std::move(noise)), coupled_(!noise_.silent() && noise_.size() > 0),
      clamp_tol_(clamp_tol) {}

Eigen::MatrixXd GraphNPoint::step_covariance(const std::vector<GraphState>& states) const {
  const Eigen::Index n = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = model_->sigma2(states[i]);
    for (Eigen::Index j = 0; j < i; ++j) s(i, j) = s(j, i) = 2.0 * noise_.C(states[i], states[j]);
  }
  return s;
}

std::vector<double> GraphNPoint::increments(const std::vector<GraphState>& states, double dt, RandomStream& common,
                                            std::vector<RandomStream>& rngs) const {
  if (rngs.size() != states.size()) throw Error(ErrorKind::InvalidArgument, "one stream per particle");
  const auto dw = common_increments(noise_.size(), dt, common);
  std::vector<double> dh(states.size()), u(noise_.size());
  for (std::size_t j = 0; j < states.size(); ++j) {
    noise_.U(states[j], u.data());
    double shared = 0.0;
    for (int k = 0; k < noise_.size(); ++k) shared += u[k] * dw[k];
    dh[j] = std::sqrt(noise_.sigma_tilde2(states[j], u.data()) * dt) * rngs[j].normal() + shared;
  }
  return dh;
}

std::vector<GraphState> GraphNPoint::step(std::vector<GraphState> states, double dt, RandomStream& common,
                                          std::vector<RandomStream>& rngs, double* clamp) const {
  if (rngs.size() != states.size()) throw Error(ErrorKind::InvalidArgument, "one stream per particle");
  if (!coupled_) {
    for (std::size_t j = 0; j < states.size(); ++j) states[j] = model_->step(states[j], dt, rngs[j]);
    return states;
  }
  if (clamp) *clamp = std::max(*clamp, factorize_covariance(step_covariance(states), clamp_tol_).clamped);
  double remaining = dt;
  while (remaining > 0) {
    double dtl = remaining;
    for (const auto& s : states) dtl = std::min(dtl, model_->local_dt(s, remaining));
    const auto dh = increments(states, dtl, common, rngs);
    for (std::size_t j = 0; j < states.size(); ++j)
      states[j] = model_->move(states[j], model_->drift(states[j]) * dtl + dh[j], rngs[j]);
    remaining = dtl >= remaining ? 0.0 : remaining - dtl;
  }
  return states;
}

NPointEnsemble GraphNPoint::simulate(const std::vector<GraphInitLaw>& inits, const std::vector<double>& times,
                                     std::size_t n_samples, const SimulationParams& params) const {
  const std::size_t n = inits.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "no particles");
  NPointEnsemble ens = empty_ensemble(n, PathKind::Graph, times, n_samples);
  std::vector<double> clamps(n_samples, 0.0);
  parallel_for(n_samples, params.threads, [&](std::size_t i) {
    RandomStream common(params.seed, StreamId::CommonNoise, i);
    auto init_rngs = particle_streams(params.seed, StreamId::InitialLaw, i, n);
    auto rngs = particle_streams(params.seed, StreamId::GraphPath, i, n);
    try {
      std::vector<GraphState> states(n);
      for (std::size_t j = 0; j < n; ++j) states[j] = inits[j](init_rngs[j]);
      double t = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double span = times[k] - t;
        if (span > 0) {
          const long m = std::max(1L, static_cast<long>(std::ceil(span / params.dt - 1e-9)));
          for (long s = 0; s < m; ++s) states = step(std::move(states), span / m, common, rngs, &clamps[i]);
          t = times[k];
        }
        for (std::size_t j = 0; j < n; ++j) {
          auto& rec = ens.particles[j].paths[i];
          rec.label[k] = states[j].edge;
          rec.c1[k] = states[j].h;
        }
      }
    } catch (const Error& e) {
      mark_sample(ens, i, e.kind());
    }
  });
  for (double c : clamps) ens.max_clamp = std::max(ens.max_clamp, c);
  return ens;
}

}  // namespace avlab
