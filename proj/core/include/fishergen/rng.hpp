#pragma once

#include <cstdint>

namespace fishergen {

/// SplitMix64 in counter mode.
///
/// The n-th output is `mix64(key + n * 0x9E3779B97F4A7C15)`, so the complete
/// generator state is the pair (key, counter). Both are plain 64-bit integers,
/// which keeps checkpointed state portable and lets any implementation
/// reproduce the stream exactly:
///
///   mix64(x): x ^= x >> 30; x *= 0xBF58476D1CE4E5B9;
///             x ^= x >> 27; x *= 0x94D049BB133111EB;
///             x ^= x >> 31
///
/// uniform() maps the top 53 bits to [0, 1). normal() is Box-Muller on two
/// fresh uniforms with no cached spare, so every normal draw advances the
/// counter by exactly two.
class CounterRng {
 public:
  struct State {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;
    friend bool operator==(const State&, const State&) = default;
  };

  CounterRng() = default;
  explicit CounterRng(std::uint64_t seed) : state_{seed, 0} {}
  explicit CounterRng(State s) : state_(s) {}

  /// Independent stream for a (seed, stream id) pair.
  static CounterRng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform();
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  State state() const { return state_; }
  void set_state(State s) { state_ = s; }

  static std::uint64_t mix64(std::uint64_t x);

 private:
  State state_;
};

}  // namespace fishergen
