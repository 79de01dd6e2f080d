#include "avlab/common/rng.hpp"

namespace avlab {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, StreamId stream, std::uint64_t index) {
  const auto s = static_cast<std::uint64_t>(stream);
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(s),    static_cast<std::uint32_t>(s >> 32),
                       static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, StreamId stream, std::uint64_t index) {
  auto seq = make_seed_seq(seed, stream, index);
  engine_.seed(seq);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace avlab
