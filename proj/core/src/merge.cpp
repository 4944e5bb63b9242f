#include "multisis/merge.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace multisis {

CanonicalKey canonicalize_sign(std::span<const u64> v, u64 q) {
  for (u64 x : v)
    if (x >= q) throw std::invalid_argument("canonicalize_sign: entry out of [0, q)");
  const u64 half = (q - 1) / 2;
  for (u64 x : v) {
    if (x == 0) continue;
    if (x <= half && half > 0) return {std::vector<u64>(v.begin(), v.end()), false};
    if (q == 2) return {std::vector<u64>(v.begin(), v.end()), false};
    std::vector<u64> neg(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) neg[i] = neg_mod(v[i], q);
    return {std::move(neg), true};
  }
  return {std::vector<u64>(v.begin(), v.end()), false};  // all zero
}

namespace {

// Compare the canonical keys of two rows' leading blocks without
// materializing them: walk entries, negating on the fly.
struct KeyView {
  const u64* data;
  bool flipped;
};

KeyView key_view(const TrackedRow& row, std::size_t width, u64 q, u64 half) {
  for (std::size_t i = 0; i < width; ++i) {
    const u64 x = row.residual[i];
    if (x == 0) continue;
    const bool flip = q != 2 && x > half;
    return {row.residual.data(), flip};
  }
  return {row.residual.data(), false};
}

u64 key_entry(const KeyView& k, std::size_t i, u64 q) {
  return k.flipped ? neg_mod(k.data[i], q) : k.data[i];
}

}  // namespace

CollisionResult find_collisions(const std::vector<TrackedRow>& rows,
                                std::size_t block_width, u64 q,
                                u64 max_recipes) {
  if (block_width < 1)
    throw std::invalid_argument("find_collisions: block width must be positive");
  for (const auto& r : rows)
    if (r.residual.size() < block_width)
      throw std::invalid_argument("find_collisions: residual narrower than block");

  const u64 half = (q - 1) / 2;
  std::vector<std::uint32_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<KeyView> keys;
  keys.reserve(rows.size());
  for (const auto& r : rows) keys.push_back(key_view(r, block_width, q, half));

  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              for (std::size_t i = 0; i < block_width; ++i) {
                const u64 ka = key_entry(keys[a], i, q);
                const u64 kb = key_entry(keys[b], i, q);
                if (ka != kb) return ka < kb;
              }
              return a < b;
            });

  auto same_key = [&](std::uint32_t a, std::uint32_t b) {
    for (std::size_t i = 0; i < block_width; ++i)
      if (key_entry(keys[a], i, q) != key_entry(keys[b], i, q)) return false;
    return true;
  };
  auto is_zero_block = [&](std::uint32_t r) {
    for (std::size_t i = 0; i < block_width; ++i)
      if (rows[r].residual[i] != 0) return false;
    return true;
  };

  CollisionResult out;
  std::size_t g_begin = 0;
  while (g_begin < order.size() && out.recipes.size() < max_recipes) {
    std::size_t g_end = g_begin + 1;
    while (g_end < order.size() && same_key(order[g_begin], order[g_end])) ++g_end;
    if (is_zero_block(order[g_begin])) {
      // the zero-key class sorts first; its rows are forwarded, not paired
      for (std::size_t i = g_begin; i < g_end && out.recipes.size() < max_recipes; ++i) {
        out.recipes.push_back({MergeRecipe::Kind::zero_row, order[i], 0, 0});
        ++out.stats.zeros;
      }
    } else {
      if (g_end - g_begin >= 2) ++out.stats.groups;
      for (std::size_t i = g_begin; i < g_end && out.recipes.size() < max_recipes; ++i) {
        for (std::size_t j = i + 1; j < g_end && out.recipes.size() < max_recipes; ++j) {
          const std::uint32_t a = order[i], b = order[j];
          // equal flip parity: blocks are equal, difference cancels;
          // opposite parity: blocks are negations, sum cancels
          const std::int8_t sign =
              keys[a].flipped == keys[b].flipped ? std::int8_t(-1) : std::int8_t(+1);
          out.recipes.push_back({MergeRecipe::Kind::pair, a, b, sign});
          ++out.stats.pairs;
        }
      }
    }
    g_begin = g_end;
  }
  return out;
}

namespace {

void check_block_cancels(const TrackedRow& a, const TrackedRow* b, int sign,
                         std::size_t width, u64 q) {
  for (std::size_t i = 0; i < width; ++i) {
    u64 v = a.residual[i];
    if (b) {
      const u64 w = sign > 0 ? b->residual[i] : neg_mod(b->residual[i], q);
      v = add_mod(v, w, q);
    }
    if (v != 0)
      throw std::logic_error(
          "apply_recipes: recipe does not zero its block (collision-finder bug)");
  }
}

}  // namespace

ApplyOutcome apply_recipes(const std::vector<TrackedRow>& rows,
                           const std::vector<MergeRecipe>& recipes,
                           std::size_t block_width, u64 q, u64 norm_cap_sq,
                           ComboSet& dedup) {
  ApplyOutcome out;
  out.rows.reserve(recipes.size());
  for (const auto& rec : recipes) {
    if (rec.src_a >= rows.size() ||
        (rec.kind == MergeRecipe::Kind::pair && rec.src_b >= rows.size()))
      throw std::invalid_argument("apply_recipes: recipe references invalid row");
    const TrackedRow& a = rows[rec.src_a];
    TrackedRow next;
    if (rec.kind == MergeRecipe::Kind::zero_row) {
      check_block_cancels(a, nullptr, 0, block_width, q);
      next.residual.assign(a.residual.begin() + long(block_width), a.residual.end());
      next.combo = a.combo;
    } else {
      if (rec.src_a == rec.src_b)
        throw std::invalid_argument("apply_recipes: pair sources must be distinct");
      const TrackedRow& b = rows[rec.src_b];
      check_block_cancels(a, &b, rec.relative_sign, block_width, q);
      next.residual.resize(a.residual.size() - block_width);
      for (std::size_t i = block_width; i < a.residual.size(); ++i) {
        const u64 w = rec.relative_sign > 0 ? b.residual[i] : neg_mod(b.residual[i], q);
        next.residual[i - block_width] = add_mod(a.residual[i], w, q);
      }
      next.combo = a.combo.combined(b.combo, rec.relative_sign);
    }
    if (next.combo.is_zero()) {
      ++out.dropped_zero_combo;
      continue;
    }
    if (next.combo.norm_sq() > norm_cap_sq) {
      ++out.dropped_norm;
      continue;
    }
    if (!dedup.insert(next.combo.canonical()).second) {
      ++out.dropped_duplicate;
      continue;
    }
    out.max_norm_sq = std::max(out.max_norm_sq, next.combo.norm_sq());
    out.rows.push_back(std::move(next));
  }
  return out;
}

u64 SolveStats::rows_processed() const {
  u64 total = 0;
  for (const auto& l : levels) total += l.rows_in;
  return total;
}

namespace {

void paranoid_residual_check(const std::vector<TrackedRow>& rows,
                             const SisInstance& inst, int consumed_cols) {
  const u64 q = inst.q();
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.residual.size(); ++j) {
      const int col = consumed_cols + int(j);
      u64 acc = 0;
      for (const auto& e : row.combo.entries()) {
        const u64 coeff = residue_of(e.coeff, q);
        acc = add_mod(acc, mul_mod(coeff, inst.at(int(e.index), col), q), q);
      }
      if (acc != row.residual[j])
        throw std::logic_error("run_levels: residual does not match its combo");
    }
  }
}

}  // namespace

SolveOutcome run_levels(std::vector<TrackedRow> level0, const Plan& plan,
                        const SisInstance& inst, SolutionSet initial,
                        const SolveOptions& opts) {
  if (plan.t < 1 || int(plan.block_widths.size()) != plan.t)
    throw std::invalid_argument("run_levels: malformed plan");
  int width_sum = 0;
  for (int w : plan.block_widths) width_sum += w;
  if (width_sum != inst.n())
    throw std::invalid_argument("run_levels: plan does not match instance");

  SolveOutcome out{std::move(initial), {}, false, -1};
  const u64 q = inst.q();
  // Final norm bound is d^2 k exactly; the nu^2 cap applies while merging.
  const u64 final_norm_sq = u64(plan.d) * u64(plan.d) * u64(plan.k);
  const u64 cap = opts.prune
                      ? u64(std::floor((long double)(plan.nu) * plan.nu))
                      : kNoLimit;

  std::vector<TrackedRow> rows = std::move(level0);
  int consumed = 0;
  for (int level = 0; level < plan.t; ++level) {
    const std::size_t width = std::size_t(plan.block_widths[std::size_t(level)]);
    const bool last = level == plan.t - 1;
    const u64 budget = last ? opts.max_rows : plan.n_targets[std::size_t(level) + 1];

    LevelStats ls;
    ls.level = level;
    ls.rows_in = rows.size();

    CollisionResult found = find_collisions(rows, width, q, budget);
    ls.groups = found.stats.groups;
    ls.pairs = found.stats.pairs;
    ls.zeros = found.stats.zeros;

    ComboSet dedup;
    ApplyOutcome applied =
        apply_recipes(rows, found.recipes, width, q, cap, dedup);
    ls.rows_out = applied.rows.size();
    ls.max_norm_sq = applied.max_norm_sq;

    // norm doubling bound: after level i every combo has norm <= 2^(i+1) sqrt(k)
    const u64 doubling_cap = (u64(1) << (2 * (level + 1))) * u64(plan.k);
    if (applied.max_norm_sq > doubling_cap)
      throw std::logic_error("run_levels: norm doubling bound violated");

    consumed += int(width);
    rows = std::move(applied.rows);
    if (opts.paranoid) paranoid_residual_check(rows, inst, consumed);
    out.stats.levels.push_back(ls);

    if (rows.empty() && !last) {
      out.starved = true;
      out.starved_level = level;
      return out;
    }
  }

  // Residuals are exhausted; what survives is a solution candidate. The
  // norm gate is the exact integer bound d^2 k; the tiny relative slack on
  // nu keeps sqrt rounding from rejecting a boundary norm.
  const double check_nu =
      double(plan.d) * std::sqrt(double(plan.k)) * (1.0 + 1e-12);
  for (const auto& row : rows) {
    if (out.solutions.size() >= opts.target_count) break;
    if (row.combo.norm_sq() > final_norm_sq) continue;
    if (!verify_solution(row.combo, inst, check_nu).valid) continue;
    out.solutions.insert(row.combo);
  }
  out.stats.norm_histogram.assign(std::size_t(final_norm_sq) + 1, 0);
  for (const auto& c : out.solutions.members())
    if (c.norm_sq() <= final_norm_sq)
      ++out.stats.norm_histogram[std::size_t(c.norm_sq())];
  if (out.solutions.size() < opts.target_count && !out.stats.levels.empty() &&
      out.stats.levels.back().rows_out == 0) {
    out.starved = true;
    out.starved_level = plan.t - 1;
  }
  return out;
}

SolveOutcome solve(const SisInstance& inst, const Plan& plan,
                   const SolveOptions& opts) {
  std::vector<SeedVector> seeds =
      collect_seeds(inst.m(), plan.k, plan.n_targets.at(0), opts.seed_order,
                    opts.rng_seed);
  Level0 level0 = materialize_level0(seeds, inst, opts.threads);
  SolutionSet initial(inst);
  const double check_nu =
      double(plan.d) * std::sqrt(double(plan.k)) * (1.0 + 1e-12);
  for (const auto& c : level0.immediate)
    if (verify_solution(c, inst, check_nu).valid) initial.insert(c);
  SolveOutcome out =
      run_levels(std::move(level0.rows), plan, inst, std::move(initial), opts);
  out.stats.seeds_used = seeds.size();
  out.stats.immediate_solutions = level0.immediate.size();
  return out;
}

}  // namespace multisis
