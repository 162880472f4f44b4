#pragma once

#include <cstdint>
#include <random>

namespace ssrs {

using Engine = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds from one run seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x5151ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return derive_seed(derive_seed(seed, stream), index);
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) { return Engine(derive_seed(seed, stream)); }

/// Named streams of a training run; each consumer of randomness owns one.
enum class Stream : std::uint64_t {
  exploration = 1,
  replay_sampling = 2,
  shaping = 3,
  estimator_batch = 4,
  estimator_init = 5,
  augmentation = 6,
  dropout = 7,
};

inline Engine make_engine(std::uint64_t seed, Stream s) { return make_engine(seed, static_cast<std::uint64_t>(s)); }

inline double uniform01(Engine& eng) { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }

inline std::size_t uniform_index(Engine& eng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng);
}

}  // namespace ssrs
