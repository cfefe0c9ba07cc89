#pragma once

// Deterministic random streams. Each stream is an mt19937_64 seeded from a
// master seed plus a purpose tag (and optionally a client id), so context
// generation, reward noise, arrival shuffling and environment setup never
// share state. Uniform/normal draws are implemented here rather than through
// <random> distributions to keep byte-identical output across standard
// library implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace fedsup {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller, two uniforms per draw, no cached spare.
  double gaussian() {
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates; std::shuffle is implementation-defined, this is not.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
};

// Seed for a named substream. client = -1 tags streams not bound to a
// particular client (arrivals, theta draw).
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                          int client = -1);

inline RngStream derive_stream(std::uint64_t master, std::string_view purpose,
                               int client = -1) {
  return RngStream(derive_seed(master, purpose, client));
}

}  // namespace fedsup
