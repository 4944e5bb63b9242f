#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"

#include "multisis/merge.hpp"
#include "multisis/oracle.hpp"
#include "multisis/rng.hpp"

using namespace multisis;

namespace {

TrackedRow row_of(std::vector<u64> residual, std::vector<i64> combo) {
  TrackedRow r;
  r.residual = std::move(residual);
  r.combo = CombinationVector::from_dense(combo);
  return r;
}

// Brute-force all-pairs collision finder: the quadratic reference the sort
// must reproduce exactly (as a set of zero-combinations).
struct RefRecipe {
  std::uint32_t a, b;  // a < b; b == a means zero_row
  int sign;

  bool operator<(const RefRecipe& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return sign < o.sign;
  }
  bool operator==(const RefRecipe&) const = default;
};

std::set<RefRecipe> quadratic_reference(const std::vector<TrackedRow>& rows,
                                        std::size_t width, u64 q) {
  std::set<RefRecipe> out;
  auto block_zero = [&](const TrackedRow& r) {
    for (std::size_t i = 0; i < width; ++i)
      if (r.residual[i] != 0) return false;
    return true;
  };
  for (std::uint32_t i = 0; i < rows.size(); ++i) {
    if (block_zero(rows[i])) {
      out.insert({i, i, 0});
      continue;  // zero-block rows are forwarded, never paired
    }
    for (std::uint32_t j = i + 1; j < rows.size(); ++j) {
      if (block_zero(rows[j])) continue;
      // for odd q at most one sign can cancel a nonzero block; q = 2 is
      // self-negating and the finder reports those pairs with sign -1
      const std::vector<int> signs = q == 2 ? std::vector<int>{-1}
                                            : std::vector<int>{+1, -1};
      for (int sign : signs) {
        bool cancels = true;
        for (std::size_t c = 0; c < width; ++c) {
          const u64 rhs = sign > 0 ? rows[j].residual[c]
                                   : (q - rows[j].residual[c]) % q;
          if ((rows[i].residual[c] + rhs) % q != 0) {
            cancels = false;
            break;
          }
        }
        if (cancels) out.insert({i, j, sign});
      }
    }
  }
  return out;
}

std::set<RefRecipe> as_reference(const std::vector<MergeRecipe>& recipes) {
  std::set<RefRecipe> out;
  for (const auto& r : recipes) {
    if (r.kind == MergeRecipe::Kind::zero_row)
      out.insert({r.src_a, r.src_a, 0});
    else
      out.insert({std::min(r.src_a, r.src_b), std::max(r.src_a, r.src_b),
                  int(r.relative_sign)});
  }
  return out;
}

}  // namespace

TEST_CASE("sign canonicalization maps v and q-v to the same key") {
  const std::vector<u64> v = {5, 0, 3};
  const CanonicalKey ck = canonicalize_sign(v, 7);
  CHECK(ck.key == std::vector<u64>{2, 0, 4});
  CHECK(ck.flipped);

  const std::vector<u64> w = {2, 0, 4};
  const CanonicalKey cw = canonicalize_sign(w, 7);
  CHECK(cw.key == w);
  CHECK_FALSE(cw.flipped);

  const std::vector<u64> zero = {0, 0};
  CHECK(canonicalize_sign(zero, 7).key == zero);
  CHECK_FALSE(canonicalize_sign(zero, 7).flipped);

  // boundary: (q-1)/2 stays, (q+1)/2 flips
  CHECK_FALSE(canonicalize_sign(std::vector<u64>{3, 1}, 7).flipped);
  CHECK(canonicalize_sign(std::vector<u64>{4, 1}, 7).flipped);

  // q = 2 is self-negating; nothing flips
  CHECK_FALSE(canonicalize_sign(std::vector<u64>{1, 0}, 2).flipped);
  CHECK(canonicalize_sign(std::vector<u64>{1, 0}, 2).key ==
        std::vector<u64>{1, 0});
}

TEST_CASE("find_collisions pairs matching and negated blocks") {
  // width-1 blocks over q=7: rows 0,2 share key 3; row 1 holds 4 = -3;
  // row 3 is a zero block; row 4 is alone.
  const std::vector<TrackedRow> rows = {
      row_of({3, 1}, {1, 0, 0, 0, 0}),
      row_of({4, 5}, {0, 1, 0, 0, 0}),
      row_of({3, 2}, {0, 0, 1, 0, 0}),
      row_of({0, 6}, {0, 0, 0, 1, 0}),
      row_of({1, 1}, {0, 0, 0, 0, 1}),
  };
  const CollisionResult found = find_collisions(rows, 1, 7);
  CHECK(found.stats.zeros == 1);
  CHECK(found.stats.groups == 1);
  CHECK(found.stats.pairs == 3);
  REQUIRE(found.recipes.size() == 4);

  // zero rows come first (the all-zero key sorts lowest)
  CHECK(found.recipes[0].kind == MergeRecipe::Kind::zero_row);
  CHECK(found.recipes[0].src_a == 3);

  // then the key-3 class {0, 2, 1-flipped}: pairs in index order
  const auto want = quadratic_reference(rows, 1, 7);
  CHECK(as_reference(found.recipes) == want);

  // signs: equal keys subtract, opposite keys add
  for (const auto& r : found.recipes) {
    if (r.kind != MergeRecipe::Kind::pair) continue;
    const bool same_side = (r.src_a != 1) == (r.src_b != 1);
    CHECK(r.relative_sign == (same_side ? -1 : +1));
  }
}

TEST_CASE("sorted collisions equal the quadratic reference on random input") {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const u64 qs[] = {2, 3, 5, 97};
    const u64 q = qs[rng.below(4)];
    const std::size_t width = 1 + rng.below(3);
    const std::size_t count = 2 + rng.below(200);
    std::vector<TrackedRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<u64> res(width + 1);
      for (auto& v : res) v = rng.below(q);
      std::vector<i64> combo(count, 0);
      combo[i] = 1;
      rows.push_back(row_of(res, combo));
    }
    const CollisionResult found = find_collisions(rows, width, q);
    CHECK(as_reference(found.recipes) == quadratic_reference(rows, width, q));
  }
}

TEST_CASE("recipe budget truncates deterministically") {
  std::vector<TrackedRow> rows;
  for (int i = 0; i < 40; ++i) {
    std::vector<i64> combo(40, 0);
    combo[std::size_t(i)] = 1;
    rows.push_back(row_of({1, u64(i % 5)}, combo));  // all share one key
  }
  const CollisionResult full = find_collisions(rows, 1, 7);
  CHECK(full.recipes.size() == 40 * 39 / 2);
  const CollisionResult cut = find_collisions(rows, 1, 7, 100);
  REQUIRE(cut.recipes.size() == 100);
  for (std::size_t i = 0; i < 100; ++i)
    CHECK(cut.recipes[i] == full.recipes[i]);
}

TEST_CASE("apply_recipes combines residues and drops the consumed block") {
  const std::vector<TrackedRow> rows = {
      row_of({3, 1, 2}, {1, 0, 0, 0}),
      row_of({4, 5, 6}, {0, 1, 0, 0}),   // 4 = -3 mod 7: sign +1 pairs with row 0
      row_of({3, 2, 1}, {0, 0, 1, 0}),
      row_of({0, 4, 4}, {0, 0, 0, 1}),
  };
  const std::vector<MergeRecipe> recipes = {
      {MergeRecipe::Kind::zero_row, 3, 0, 0},
      {MergeRecipe::Kind::pair, 0, 1, +1},
      {MergeRecipe::Kind::pair, 0, 2, -1},
  };
  ComboSet dedup;
  const ApplyOutcome out = apply_recipes(rows, recipes, 1, 7, kNoLimit, dedup);
  REQUIRE(out.rows.size() == 3);

  CHECK(out.rows[0].residual == std::vector<u64>{4, 4});
  CHECK(out.rows[0].combo.to_dense(4) == std::vector<i64>{0, 0, 0, 1});

  CHECK(out.rows[1].residual == std::vector<u64>{6, 1});  // (1+5, 2+6) mod 7
  CHECK(out.rows[1].combo.to_dense(4) == std::vector<i64>{1, 1, 0, 0});

  CHECK(out.rows[2].residual == std::vector<u64>{6, 1});  // (1-2, 2-1) mod 7
  CHECK(out.rows[2].combo.to_dense(4) == std::vector<i64>{1, 0, -1, 0});

  CHECK(out.max_norm_sq == 2);
  CHECK(out.dropped_zero_combo == 0);
  CHECK(out.dropped_duplicate == 0);
  CHECK(out.dropped_norm == 0);
}

TEST_CASE("apply_recipes enforces cancellation, dedup, and the norm cap") {
  const std::vector<TrackedRow> rows = {
      row_of({3}, {1, 1, 0}),
      row_of({4}, {1, -1, 0}),
      row_of({3}, {-1, 1, 0}),
  };
  // rows 1 and 2 carry opposite combos, so 0+1 and 0-2 produce the same
  // vector; the second is a duplicate
  const std::vector<MergeRecipe> ok_recipes = {
      {MergeRecipe::Kind::pair, 0, 1, +1},
      {MergeRecipe::Kind::pair, 0, 2, -1},
  };
  {
    ComboSet dedup;
    const ApplyOutcome out =
        apply_recipes(rows, ok_recipes, 1, 7, kNoLimit, dedup);
    CHECK(out.rows.size() == 1);
    CHECK(out.rows[0].combo.to_dense(3) == std::vector<i64>{2, 0, 0});
    CHECK(out.dropped_duplicate == 1);
  }
  {
    // the same pair under the norm cap 3 is dropped (norm_sq = 4)
    ComboSet dedup;
    const ApplyOutcome out = apply_recipes(rows, ok_recipes, 1, 7, 3, dedup);
    CHECK(out.rows.empty());
    CHECK(out.dropped_norm >= 1);
  }
  {
    // pairing rows 1 and 2 (sign +1) cancels the combined combo to zero
    ComboSet dedup;
    const std::vector<MergeRecipe> cancel = {
        {MergeRecipe::Kind::pair, 1, 2, +1},
    };
    const ApplyOutcome out = apply_recipes(rows, cancel, 1, 7, kNoLimit, dedup);
    CHECK(out.rows.empty());
    CHECK(out.dropped_zero_combo == 1);
  }
  {
    // a recipe that does not zero its block is a logic error
    ComboSet dedup;
    const std::vector<MergeRecipe> bad = {
        {MergeRecipe::Kind::pair, 0, 1, -1},  // 3 - 4 != 0 mod 7
    };
    CHECK_THROWS_AS(apply_recipes(rows, bad, 1, 7, kNoLimit, dedup),
                    std::logic_error);
  }
}

TEST_CASE("a depth-1 instance is solved exactly") {
  // A = (1,2,3,4,0,1)^T over q=5; nu=2 admits weight-<=2 solutions only.
  SisInstance inst(1, 6, 5, {1, 2, 3, 4, 0, 1});
  const Plan plan = plan_parameters(1, 6, 5, 2.0, 10, 1 << 10);
  REQUIRE(plan.t == 1);
  REQUIRE(plan.k == 1);

  SolveOptions opts;
  opts.target_count = 10;
  opts.seed_order = SeedOrder::lex;
  const SolveOutcome out = solve(inst, plan, opts);

  // ground truth from the independent ball scan, restricted to the shapes a
  // depth-1 run can reach: +-1 coefficients, at most two of them
  const OracleResult oracle = brute_force_ball(inst, 2.0);
  ComboSet truth;
  for (const auto& c : oracle.solutions) {
    bool pm1 = true;
    for (const auto& e : c.entries())
      if (e.coeff != 1 && e.coeff != -1) pm1 = false;
    if (pm1 && c.weight() <= 2) truth.insert(c.canonical());
  }

  // e4 alone vanishes; e0-e5, e0+e3, e1+e2, e3+e5 cancel mod 5. The solver
  // must find exactly the oracle set restricted to its seed shape.
  CHECK(out.solutions.size() == truth.size());
  for (const auto& c : out.solutions.members())
    CHECK(truth.count(c.canonical()) == 1);
  CHECK(out.stats.immediate_solutions == 1);
  CHECK_FALSE(out.starved);
}

TEST_CASE("solve is deterministic for fixed options, any thread count") {
  SisInstance inst = gen_instance(2, 50, 5, 77);
  const Plan plan = plan_parameters(2, 50, 5, 6.0, 20, 1 << 14);
  SolveOptions opts;
  opts.target_count = 20;
  opts.rng_seed = 9;

  const SolveOutcome a = solve(inst, plan, opts);
  const SolveOutcome b = solve(inst, plan, opts);
  SolveOptions threaded = opts;
  threaded.threads = 4;
  const SolveOutcome c = solve(inst, plan, threaded);

  CHECK(a.solutions.members() == b.solutions.members());
  CHECK(a.solutions.members() == c.solutions.members());
  REQUIRE(a.stats.levels.size() == c.stats.levels.size());
  for (std::size_t i = 0; i < a.stats.levels.size(); ++i) {
    CHECK(a.stats.levels[i].rows_in == c.stats.levels[i].rows_in);
    CHECK(a.stats.levels[i].rows_out == c.stats.levels[i].rows_out);
    CHECK(a.stats.levels[i].pairs == c.stats.levels[i].pairs);
  }
}

TEST_CASE("per-level norms respect the doubling bound") {
  SisInstance inst = gen_instance(4, 200, 97, 1);
  const Plan plan = plan_parameters(4, 200, 97, 16.0, 5, 1 << 15);
  SolveOptions opts;
  opts.target_count = 5;
  const SolveOutcome out = solve(inst, plan, opts);
  REQUIRE_FALSE(out.stats.levels.empty());
  for (const auto& l : out.stats.levels) {
    const u64 cap = (u64(1) << (2 * (l.level + 1))) * u64(plan.k);
    CHECK(l.max_norm_sq <= cap);
  }
  for (const auto& c : out.solutions.members())
    CHECK(c.norm_sq() <= u64(plan.d) * u64(plan.d) * u64(plan.k));
}

TEST_CASE("paranoid mode recomputes residuals without changing results") {
  SisInstance inst = gen_instance(2, 40, 5, 13);
  const Plan plan = plan_parameters(2, 40, 5, 6.0, 5, 1 << 13);
  SolveOptions opts;
  opts.target_count = 5;
  const SolveOutcome plain = solve(inst, plan, opts);
  SolveOptions paranoid = opts;
  paranoid.paranoid = true;
  const SolveOutcome checked = solve(inst, plan, paranoid);
  CHECK(plain.solutions.members() == checked.solutions.members());
}

TEST_CASE("a level that yields no rows reports starvation") {
  // hand-built level 0 whose block residues never collide: q=97, four rows
  // with distinct, non-negating first residues
  SisInstance inst = gen_instance(2, 12, 97, 3);
  Plan plan;
  plan.t = 2;
  plan.k = 2;
  plan.d = 4;
  plan.s = 1;
  plan.nu = 6.0;
  plan.block_widths = {1, 1};
  plan.n_targets = {4, 16, 16};
  plan.predicted_cost = std::log(97.0);

  std::vector<TrackedRow> level0 = {
      row_of({1, 5}, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
      row_of({2, 6}, {0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
      row_of({3, 7}, {0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
      row_of({4, 8}, {0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0}),
  };
  SolveOutcome out = run_levels(std::move(level0), plan, inst,
                                SolutionSet(inst), SolveOptions{});
  CHECK(out.starved);
  CHECK(out.starved_level == 0);
  CHECK(out.solutions.size() == 0);
}

TEST_CASE("solve validates the plan against the instance") {
  SisInstance inst = gen_instance(2, 12, 5, 3);
  Plan plan = plan_parameters(2, 12, 5, 6.0, 1, 1 << 10);
  plan.block_widths = {1, 2};  // sums to 3 != n
  SolveOptions opts;
  CHECK_THROWS_AS(solve(inst, plan, opts), std::invalid_argument);
}

TEST_CASE("norm histogram counts exactly the emitted solutions") {
  SisInstance inst = gen_instance(2, 50, 5, 21);
  const Plan plan = plan_parameters(2, 50, 5, 6.0, 30, 1 << 14);
  SolveOptions opts;
  opts.target_count = 30;
  const SolveOutcome out = solve(inst, plan, opts);
  u64 histogram_total = 0;
  for (u64 c : out.stats.norm_histogram) histogram_total += c;
  CHECK(histogram_total == out.solutions.size());
}
