#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avlab/flows/noise.hpp"

namespace avlab {

enum class ExperimentKind { Averaging, Book, Flow };

std::string to_string(ExperimentKind kind);

struct ModelSpec {
  /// "radial-quadratic", "duffing-well" or an expression in x1, x2.
  std::string hamiltonian = "duffing-well";
  double nu = 0.5;
  double box = 6.0;
  /// "zero" or "restoring" (V0 = −drift_rate·x).
  std::string drift = "zero";
  double drift_rate = 0.0;
  /// Exponent α of 𝒲 = (1 + |x|²)^α for the book model.
  double confinement = 2.5;
};

struct InitSpec {
  /// "point", "annulus" (planar) or "gaussian" (truncated, any dimension).
  std::string law = "point";
  std::vector<double> point{1.5, 0.0};
  std::vector<double> center{0.0, 0.0};
  double r_in = 0.0, r_out = 1.0;
  double sd = 0.5, radius = 2.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Averaging;
  std::string name = "experiment";
  std::string output = "out";

  ModelSpec model;
  InitSpec init;

  int nodes = 96;
  double truncation = 15.0;

  std::vector<double> kappas;
  std::vector<double> times{1.0};
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  double dt = 1e-3;

  /// Largest distance accepted at the largest κ; ≤ 0 disables the check.
  double max_distance = 0.0;
  bool monotone = false;
  /// Require every per-label KS statistic below its 99% threshold.
  bool within_noise = false;
  /// Book: χ² test of uniform page occupation at the last time.
  bool page_uniformity = false;
  /// Width, in combined standard errors, of the Monte-Carlo agreement checks.
  double mc_sigmas = 3.0;
  double clamp_tol = 1e-8;

  FourierPreset noise;
  /// Fraction of the largest admissible amplitude; overrides noise.amplitude when > 0.
  double noise_fraction = 0.0;
  /// Starting points of the flow particles, one (x1, x2) pair each.
  std::vector<std::vector<double>> starts;
  std::size_t correlation_samples = 100000;

  /// key = value text with every key spelled out in schema order.
  std::string canonical() const;
  /// SHA-256 of the canonical text without the output directory.
  std::string hash() const;
};

/// INI text: [section] headers and key = value lines, ';' or '#' comments.
/// Lists are comma separated; flow starts are points separated by ';'.
/// Unknown sections or keys, malformed values and missing required keys
/// throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& file);

std::string sha256_hex(const std::string& bytes);

/// The documented schema as text: one line per key with its default.
std::string config_schema();

}  // namespace avlab
