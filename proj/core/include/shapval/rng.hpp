#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace shapval::rng {

// Stable 64-bit mixer (the splitmix64 finalizer). Derives independent stream
// seeds from a base seed plus a purpose tag or counter, so that consumers of
// one user-facing seed never share a sequence.
constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + b;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream purpose tags.
inline constexpr std::uint64_t kSynthTrainStream = 1;
inline constexpr std::uint64_t kSynthTestStream = 2;
inline constexpr std::uint64_t kNoiseStream = 3;
inline constexpr std::uint64_t kTracePickStream = 4;
inline constexpr std::uint64_t kPermutationStream = 5;

// Deterministic uniform/gaussian source. std::mt19937_64 output is fully
// specified by the standard; the adapters below are hand rolled because the
// std::*_distribution classes are implementation defined and would break
// bit reproducibility across standard libraries.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53 random bits.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), unbiased via rejection. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal deviate (Box-Muller, pairs handed out in order).
  double next_gaussian();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// In-place Fisher-Yates shuffle driven by the stream.
template <typename T>
void shuffle(std::vector<T>& values, Stream& stream) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(stream.next_below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace shapval::rng
