#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "smate/framing.hpp"

namespace smate {

/// SplitMix64. Streams are split by hashing a label into the seed so that
/// independent consumers never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(label.data());
    Rng mixer(seed ^ fnv1a64(std::span<const std::uint8_t>(p, label.size())) ^ (index * 0x9E3779B97F4A7C15ULL));
    return Rng(mixer.next());
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

  void fill(std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < out.size(); i += 8) {
      const std::uint64_t v = next();
      for (std::size_t j = 0; j < 8 && i + j < out.size(); ++j) out[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace smate
