#pragma once

#include <cmath>
#include <cstdint>

namespace kaon {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-event random stream. Event `i` of a run with seed `s` always sees the
/// same sequence, no matter which worker generates it:
///   state_0 = mix64(mix64(s) ^ mix64(i + golden))
///   state_k = state_{k-1} + golden, output mix64(state_k)
/// Distributions are implemented here (not <random>) so output is identical
/// across standard libraries.
class EventStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  EventStream(std::uint64_t seed, std::uint64_t event_id)
      : state_(mix64(mix64(seed) ^ mix64(event_id + kGolden))) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Exponential with `rate`, conditioned on falling in [0, width).
  double truncated_exponential(double rate, double width) {
    const double u = uniform();
    return -std::log1p(u * std::expm1(-rate * width)) / rate;
  }

 private:
  std::uint64_t state_;
};

}  // namespace kaon
