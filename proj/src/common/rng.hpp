#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace misengine {

// Recorded in every artifact header that depends on random draws.
inline constexpr std::string_view kRngAlgorithm = "xoshiro256**/splitmix64-seeded/lemire-bounded/v1";

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** with a portable bounded-integer routine, so draws are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  // Independent stream for (seed, key): used for per-instruction and
  // per-purpose streams.
  static Rng stream(std::uint64_t seed, std::uint64_t key) {
    std::uint64_t sm = seed;
    const std::uint64_t a = splitmix64(sm);
    sm = key ^ a;
    return Rng(splitmix64(sm));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

// Partial Fisher-Yates: moves `count` uniformly chosen elements (without
// replacement, in draw order) to the front of `items`.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t count, Rng& rng) {
  const std::size_t n = items.size();
  for (std::size_t i = 0; i < count && i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(items[i], items[j]);
  }
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  partial_shuffle(items, items.size(), rng);
}

}  // namespace misengine
