#pragma once

// Counter-based random streams.
//
// Every random decision in the engine is drawn from a stream keyed by a tuple
// of integers (run seed, purpose tag, agent id, step, ...). Streams never share
// state, so the order in which agents, runs or sweep cells are evaluated cannot
// change any draw.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace vatgame {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a list of keys into a 64-bit seed. Distinct key tuples give
/// statistically independent seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t k : keys) {
    h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  }
  return h;
}

/// Purpose tags so that draws for different concerns never collide.
enum class StreamTag : std::uint64_t {
  Topology = 1,
  Rewire = 2,
  Weights = 3,
  Strategies = 4,
  Anchors = 5,
  Imitation = 6,
  Interaction = 7,
  Run = 8,
  Fixture = 9,
};

constexpr std::uint64_t tag(StreamTag t) noexcept { return static_cast<std::uint64_t>(t); }

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator so it can feed
/// <random> distributions, and offers the few draws the engine needs directly.
class Rng {
  __extension__ using u128 = unsigned __int128;

 public:
  using result_type = std::uint64_t;

  constexpr explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept
      : state_(derive_seed(seed, keys)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Lemire's multiply-and-reject, unbiased.
  std::uint64_t below(std::uint64_t n) noexcept {
    u128 m = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<u128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace vatgame
