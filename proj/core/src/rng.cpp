#include "fishergen/rng.hpp"

#include <cmath>
#include <numbers>

namespace fishergen {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t CounterRng::mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

CounterRng CounterRng::derive(std::uint64_t seed, std::uint64_t stream) {
  return CounterRng(mix64(mix64(seed) ^ (stream * kGolden + 0x632BE59BD9B4E019ULL)));
}

std::uint64_t CounterRng::next_u64() {
  ++state_.counter;
  return mix64(state_.key + state_.counter * kGolden);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double CounterRng::normal() {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

}  // namespace fishergen
