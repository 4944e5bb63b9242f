#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "multisis/estimator.hpp"
#include "multisis/instance.hpp"
#include "multisis/seeds.hpp"

namespace multisis {

// Sign-canonical form of a Z_q block: v or q-v, whichever puts the first
// nonzero entry in [1, (q-1)/2]. For q = 2 the two coincide and nothing is
// ever flipped.
struct CanonicalKey {
  std::vector<u64> key;
  bool flipped;
};

CanonicalKey canonicalize_sign(std::span<const u64> v, u64 q);

// One row of the next-level combination matrix: forward a row whose block
// is zero, or combine two rows whose blocks cancel.
struct MergeRecipe {
  enum class Kind : std::uint8_t { zero_row, pair };
  Kind kind;
  std::uint32_t src_a;
  std::uint32_t src_b;        // pair only
  std::int8_t relative_sign;  // pair only: block_a + sign * block_b == 0

  bool operator==(const MergeRecipe&) const = default;
};

struct CollisionStats {
  u64 groups = 0;  // nonzero-key classes with at least two members
  u64 pairs = 0;   // pair recipes emitted
  u64 zeros = 0;   // zero-row recipes emitted
};

struct CollisionResult {
  std::vector<MergeRecipe> recipes;
  CollisionStats stats;
};

// Sorts rows by the canonical key of their leading `block_width` residual
// columns (ties broken by original index) and emits, in sorted order, one
// zero_row recipe per all-zero block followed by every in-group pair, up to
// max_recipes. Deterministic given the input order.
CollisionResult find_collisions(const std::vector<TrackedRow>& rows,
                                std::size_t block_width, u64 q,
                                u64 max_recipes = kNoLimit);

struct ApplyOutcome {
  std::vector<TrackedRow> rows;
  u64 dropped_zero_combo = 0;
  u64 dropped_duplicate = 0;
  u64 dropped_norm = 0;
  u64 max_norm_sq = 0;
};

// Applies recipes in order: drops the consumed block from the residual,
// combines combination vectors, and discards results that cancel to zero,
// duplicate the dedup set (under canonical sign), or exceed norm_cap_sq.
// Every recipe is checked to actually zero its block; a violation throws
// std::logic_error, signalling a collision-finder bug.
ApplyOutcome apply_recipes(const std::vector<TrackedRow>& rows,
                           const std::vector<MergeRecipe>& recipes,
                           std::size_t block_width, u64 q, u64 norm_cap_sq,
                           ComboSet& dedup);

struct LevelStats {
  int level = 0;
  u64 rows_in = 0;
  u64 groups = 0;
  u64 pairs = 0;
  u64 zeros = 0;
  u64 rows_out = 0;
  u64 max_norm_sq = 0;
};

struct SolveStats {
  u64 seeds_used = 0;
  u64 immediate_solutions = 0;
  std::vector<LevelStats> levels;
  std::vector<u64> norm_histogram;  // final solutions by squared norm

  u64 rows_processed() const;
};

struct SolveOptions {
  u64 target_count = 1;
  u64 max_rows = u64(1) << 17;
  SeedOrder seed_order = SeedOrder::random;
  u64 rng_seed = 0;
  bool prune = true;       // cap combo norms at nu^2 during merging
  bool paranoid = false;   // recompute every residual from its combo per level
  int threads = 1;
};

struct SolveOutcome {
  SolutionSet solutions;
  SolveStats stats;
  bool starved = false;
  int starved_level = -1;

  bool reached(u64 target) const { return solutions.size() >= target; }
};

// Runs the level loop over an already-materialized level 0. Initial
// solutions (zero residuals at level 0) are passed in via `initial`.
SolveOutcome run_levels(std::vector<TrackedRow> level0, const Plan& plan,
                        const SisInstance& inst, SolutionSet initial,
                        const SolveOptions& opts);

// Full pipeline: seed enumeration, level-0 materialization, level loop.
SolveOutcome solve(const SisInstance& inst, const Plan& plan,
                   const SolveOptions& opts);

}  // namespace multisis
