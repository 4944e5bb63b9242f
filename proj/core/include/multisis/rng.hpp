#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace multisis {

// Seeded generator with unbiased bounded sampling. mt19937_64 has a fixed
// standardized sequence, so runs are reproducible across builds; the bounded
// draw avoids std::uniform_int_distribution, whose mapping is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform on [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
    const std::uint64_t lo = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t x;
    do {
      x = eng_();
    } while (x < lo);
    return x % bound;
  }

  bool coin() { return (eng_() & 1) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace multisis
