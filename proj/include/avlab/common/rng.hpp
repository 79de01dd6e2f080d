#pragma once

#include <cstdint>
#include <random>

namespace avlab {

/// Stream identifiers keep independent consumers of one seed apart.
enum class StreamId : std::uint64_t {
  InitialLaw = 1,
  GraphPath = 2,
  AmbientPath = 3,
  BookPath = 4,
  CommonNoise = 5,
  Particle = 6,
  MonteCarlo = 7,
  NoisePreset = 8,
};

/// A reproducible random stream keyed by (seed, stream, index). Two streams
/// with the same key produce the same sequence regardless of which thread
/// constructs them, which is what makes ensembles independent of the worker
/// count.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamId stream, std::uint64_t index);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace avlab
