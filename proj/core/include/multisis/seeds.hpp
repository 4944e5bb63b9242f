#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "multisis/instance.hpp"

namespace multisis {

// A +-1-support combination vector of squared norm (= weight) at most k, in
// canonical form: indices strictly increasing, first sign +1.
struct SeedVector {
  struct Entry {
    std::uint32_t index;
    std::int8_t sign;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> support;

  bool operator==(const SeedVector&) const = default;
  CombinationVector to_combination() const;
};

enum class SeedOrder { lex, random };

inline constexpr u64 kNoLimit = ~u64(0);

// Streams distinct canonical seeds of weight 1..k, weight classes in
// ascending order. In lex mode a class is emitted support-lexicographically
// with sign patterns counted in binary; in random mode each class is a
// uniform draw without replacement. Stops after min(limit, capacity(m,k))
// seeds. Never emits both v and -v.
void enumerate_seeds(int m, int k, u64 limit, SeedOrder order, u64 rng_seed,
                     const std::function<void(const SeedVector&)>& emit);

std::vector<SeedVector> collect_seeds(int m, int k, u64 limit, SeedOrder order,
                                      u64 rng_seed);

// A residual row over Z_q paired with the integer combination that produced
// it. The residual covers the not-yet-consumed columns only.
struct TrackedRow {
  std::vector<u64> residual;
  CombinationVector combo;
};

struct Level0 {
  std::vector<TrackedRow> rows;                  // nonzero residuals
  std::vector<CombinationVector> immediate;      // seeds with zero residual
};

// Computes C0 * A for the given seeds. Rows whose full residual is already
// zero are split off as immediate solutions. Deterministic for any thread
// count: results are stitched in seed order.
Level0 materialize_level0(const std::vector<SeedVector>& seeds,
                          const SisInstance& inst, int threads = 1);

}  // namespace multisis
