#pragma once

#include <Eigen/Core>
#include <vector>

#include "avlab/ambient/ambient.hpp"
#include "avlab/flows/averaged_noise.hpp"
#include "avlab/flows/noise.hpp"
#include "avlab/graphsim/graph_model.hpp"
#include "avlab/graphsim/graph_simulator.hpp"

namespace avlab {

/// n particles of one flow sample. Particle j of sample i is path i of
/// particles[j]; a failure of any particle flags the whole sample.
struct NPointEnsemble {
  std::vector<Ensemble> particles;
  /// Largest eigenvalue clamp met while factorizing step covariances.
  double max_clamp = 0.0;

  std::size_t size() const { return particles.empty() ? 0 : particles.front().paths.size(); }
  std::size_t flagged() const { return particles.empty() ? 0 : particles.front().flagged(); }
};

/// n ambient particles driven by one common noise Σ_k U_k dW^k (Itô) plus
/// idiosyncratic noise of covariance 2νI − Σ_k U_kU_kᵀ, split around the
/// κ-flow exactly as the one-particle step. Each particle alone is the
/// one-particle diffusion; only the cross covariances carry the noise.
class AmbientNPoint {
 public:
  AmbientNPoint(const HamiltonianSystem2D& sys, NoiseModel noise, AmbientConfig cfg, double psd_tol = 1e-12);

  const NoiseModel& noise() const { return noise_; }
  const AmbientSimulator<2>& simulator() const { return sim_; }

  /// Common increments come from `common`, particle j uses rngs[j].
  std::vector<Vec2> step(std::vector<Vec2> xs, double dt, RandomStream& common, std::vector<RandomStream>& rngs) const;
  std::vector<Vec2> advance(std::vector<Vec2> xs, double span, RandomStream& common,
                            std::vector<RandomStream>& rngs) const;

  /// Sample i uses (seed, CommonNoise, i) for the common increments and, for
  /// particle j, (seed, InitialLaw, i·n + j) and (seed, AmbientPath, i·n + j).
  /// With n = 1 and silent noise this reproduces simulate_projected.
  NPointEnsemble simulate(const Projection& proj, const std::vector<AmbientInitLaw<2>>& inits,
                          const std::vector<double>& times, std::size_t n_samples, std::uint64_t seed,
                          unsigned threads = 1) const;

 private:
  Vec2 diffuse(const Vec2& x, double tau, const std::vector<double>& dw, RandomStream& rng) const;

  const HamiltonianSystem2D* sys_;
  NoiseModel noise_;
  AmbientSimulator<2> sim_;
  double psd_tol_;
};

std::vector<Vec2> npoint_ambient_step(const HamiltonianSystem2D& sys, const NoiseModel& noise,
                                      const AmbientConfig& cfg, const std::vector<Vec2>& xs, double dt,
                                      RandomStream& common, std::vector<RandomStream>& rngs);

struct CovarianceRoot {
  Eigen::MatrixXd root;
  double clamped = 0.0;
};

/// Symmetric square root with negative eigenvalues set to 0. Throws
/// PSDViolation when the most negative one is below −tol·(1 + max|Σ|).
CovarianceRoot factorize_covariance(const Eigen::MatrixXd& sigma, double tol = 1e-8);

/// n graph particles: dY^j = b dt + σ̃(Y^j) dB^j + Σ_k Ũ_k(Y^j) dW^k with the
/// vertex rules of the one-particle model. Joint substeps are the smallest
/// local step over the particles. With silent noise every particle is
/// stepped on its own exactly like GraphModel::step.
class GraphNPoint {
 public:
  GraphNPoint(const GraphModel& model, AveragedNoise noise, double clamp_tol = 1e-8);

  const GraphModel& model() const { return *model_; }
  const AveragedNoise& noise() const { return noise_; }
  bool coupled() const { return coupled_; }

  /// Per-unit-time covariance of the level increments: σ²(y_i) on the
  /// diagonal, 2C̃(y_i, y_j) off it.
  Eigen::MatrixXd step_covariance(const std::vector<GraphState>& states) const;

  /// Gaussian part of one joint increment over dt, without drift or moves.
  std::vector<double> increments(const std::vector<GraphState>& states, double dt, RandomStream& common,
                                 std::vector<RandomStream>& rngs) const;

  std::vector<GraphState> step(std::vector<GraphState> states, double dt, RandomStream& common,
                               std::vector<RandomStream>& rngs, double* clamp = nullptr) const;

  /// Sample i uses (seed, CommonNoise, i) and, for particle j,
  /// (seed, InitialLaw, i·n + j) and (seed, GraphPath, i·n + j).
  NPointEnsemble simulate(const std::vector<GraphInitLaw>& inits, const std::vector<double>& times,
                          std::size_t n_samples, const SimulationParams& params) const;

 private:
  const GraphModel* model_;
  AveragedNoise noise_;
  bool coupled_;
  double clamp_tol_;
};

}  // namespace avlab
