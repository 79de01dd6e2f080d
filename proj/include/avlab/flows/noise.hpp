#pragma once

#include <cstdint>
#include <vector>

#include "avlab/common/types.hpp"
#include "avlab/fields/hamiltonian.hpp"

namespace avlab {

/// U(x) = amplitude · cos(⟨ω, x⟩ + phase) · direction. With ω = 0 and
/// phase = 0 this is a constant field.
struct NoiseMode {
  double amplitude = 0.0;
  Vec2 omega = Vec2::Zero();
  double phase = 0.0;
  Vec2 direction = Vec2(1.0, 0.0);
};

struct FourierPreset {
  int modes = 8;
  double k_min = 0.5;
  double k_max = 2.0;
  /// √(Σ a_k²); the common-noise rate never exceeds amplitude² in any direction.
  double amplitude = 0.5;
  double delta = 0.5;
  std::uint64_t seed = 1;
  /// Fields along ω_k instead of across it: curl-free rather than divergence-free.
  bool compressible = false;
};

/// Common vector-field noise Σ_k U_k dW^k acting on every particle.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(std::vector<NoiseMode> modes, double delta);

  /// Family U_k = a cos(⟨ω_k, x⟩ + φ_k) ω_k^⊥/|ω_k| (ω_k/|ω_k| when
  /// compressible) with |ω_k| uniform in [k_min, k_max], uniform angle and
  /// phase, equal amplitudes.
  static NoiseModel fourier(const FourierPreset& preset);
  /// The single constant field amplitude · direction.
  static NoiseModel constant(const Vec2& direction, double amplitude, double delta);
  /// Largest total amplitude compatible with the margin δ at diffusivity ν.
  static double max_amplitude(double nu, double delta);

  int size() const { return static_cast<int>(modes_.size()); }
  const std::vector<NoiseMode>& modes() const { return modes_; }
  double delta() const { return delta_; }
  bool silent() const;

  Vec2 field(int k, const Vec2& x) const;
  Mat2 jacobian(int k, const Vec2& x) const;
  /// Σ_k U_k(x) U_k(y)ᵀ: covariance rate of the common increments.
  Mat2 rate(const Vec2& x, const Vec2& y) const;
  /// ½ Σ_k (DU_k) U_k: the drift by which Σ_k U_k∘dW^k differs from the
  /// Itô form Σ_k U_k dW^k that the particle steps use.
  Vec2 ito_correction(const Vec2& x) const;
  double divergence(int k, const Vec2& x) const { return jacobian(k, x).trace(); }
  /// U_k · ∇H at x for every k.
  std::vector<double> along_gradient(const HamiltonianSystem2D& sys, const Vec2& x) const;

  /// Largest eigenvalue of rate(x, x) over an n×n grid of the box, divided
  /// by 2ν. Throws PSDViolation when it exceeds 1 − δ by more than tol.
  double check_pure_diffusion(double nu, const Box& box, int n = 41, double tol = 1e-12) const;

 private:
  std::vector<NoiseMode> modes_;
  double delta_ = 1.0;
};

}  // namespace avlab
