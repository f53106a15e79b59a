#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace georob {

using Engine = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds from a run
// seed plus counters so parallel work never shares generator state.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t c : counters) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> counters = {}) {
  return Engine(derive_seed(seed, counters));
}

// Stream tags, so derived seeds for different purposes never collide.
namespace stream {
inline constexpr std::uint64_t kTrainData = 1;
inline constexpr std::uint64_t kTestData = 2;
inline constexpr std::uint64_t kInit = 3;
inline constexpr std::uint64_t kShuffle = 4;
inline constexpr std::uint64_t kAdversary = 5;
inline constexpr std::uint64_t kProbe = 6;
inline constexpr std::uint64_t kRotation = 7;
inline constexpr std::uint64_t kAttack = 8;
inline constexpr std::uint64_t kMonteCarlo = 9;
inline constexpr std::uint64_t kNoise = 10;
inline constexpr std::uint64_t kRestart = 11;
}  // namespace stream

}  // namespace georob
