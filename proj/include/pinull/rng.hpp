#pragma once

// Seed derivation. Every consumer of randomness gets its own engine seeded
// from (seed, stream[, substream]) so results never depend on scheduling.

#include <cstdint>
#include <random>

namespace pinull {

using Engine = std::mt19937_64;

enum class Stream : std::uint64_t {
  statistics = 1,
  placement = 2,
  bootstrap = 3,
  folds = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 1));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

inline Engine make_engine(std::uint64_t seed, Stream stream) {
  return Engine(derive_seed(seed, stream));
}

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t substream) {
  return Engine(derive_seed(derive_seed(seed, stream), substream));
}

}  // namespace pinull
