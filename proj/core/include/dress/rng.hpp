#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace dress::nd {

// Seedable, splittable counter-based generator (splitmix64 core). Streams are
// derived by name or index without advancing the parent, so every component
// of a run draws from its own reproducible sequence. Only integer ops and an
// IEEE double divide are used, which keeps sequences bit-identical across
// platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform in [0, n) via 128-bit multiply-shift.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Child stream named by a label; the parent is not advanced.
  Rng split(std::string_view name) const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ull;
    }
    return Rng(mix(state_ ^ h));
  }

  Rng split(std::uint64_t index) const { return Rng(mix(state_ + 0x9E3779B97F4A7C15ull * (index + 1))); }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
    return z ^ (z >> 33);
  }

  std::uint64_t state_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng.next_index(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace dress::nd
