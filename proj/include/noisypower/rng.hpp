#pragma once

#include <cstdint>
#include <random>

namespace noisypower {

// All randomness flows through std::mt19937_64, whose output sequence for a
// given seed is fixed by the standard. Distribution adapters
// (std::normal_distribution etc.) are only pinned per build, which is the
// reproducibility contract: identical build + identical seed -> identical run.
using RngEngine = std::mt19937_64;

// splitmix64 finalizer; decorrelates (seed, stream) pairs so that parallel
// trials can each own an independent engine derived from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline RngEngine make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return RngEngine(mix_seed(seed, stream));
}

// Stream tags used by the algorithms so that e.g. the initial basis draw is
// identical across algorithms sharing a seed, independent of how much noise
// randomness each consumes afterwards.
inline constexpr std::uint64_t kStreamInit = 1;
inline constexpr std::uint64_t kStreamNoise = 2;
inline constexpr std::uint64_t kStreamSamples = 3;
// Per-trial engines for probe/profile runs use kStreamTrialBase + trial index.
inline constexpr std::uint64_t kStreamTrialBase = 1u << 16;

}  // namespace noisypower
