#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace gecforge {

// Counter-based pseudo random generator built on the splitmix64 finalizer.
//
// Draw i of a stream is mix(key + i * gamma), a pure function of (key, i).
// That buys two things the standard <random> engines do not give us:
//   - independent substreams can be derived per work item (line index,
//     repetition, round), so parallel workers reproduce the exact draws of a
//     sequential run regardless of scheduling;
//   - the raw 64-bit outputs, and everything derived from them below, are
//     identical across platforms and standard libraries. std::uniform_*
//     distributions make no such promise, so they are deliberately avoided.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

  // Independent stream for work item (a, b) under the same seed, e.g.
  // (line index, repetition). Distinct (seed, a, b) triples give keys that
  // collide only with ~2^-64 probability.
  static SplitRng substream(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b = 0) {
    SplitRng r(seed);
    r.key_ = mix(r.key_ + kGolden * (a + 1));
    r.key_ = mix(r.key_ + kGolden * (b + 1));
    return r;
  }

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return mix(key_ + counter_);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n) for n >= 1 via 128-bit multiply-shift. The bias of
  // n / 2^64 is negligible for the n used here (vocabulary sizes, indices).
  std::uint64_t next_below(std::uint64_t n) {
    using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates shuffle driven by SplitRng, for reproducible permutations.
template <typename T>
void shuffle(std::vector<T>& values, SplitRng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[rng.next_below(i)]);
  }
}

}  // namespace gecforge
