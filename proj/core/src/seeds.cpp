#include "multisis/seeds.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "multisis/bigint.hpp"
#include "multisis/rng.hpp"

namespace multisis {

CombinationVector SeedVector::to_combination() const {
  CombinationVector v;
  for (const auto& e : support)
    v = v.combined(CombinationVector::unit(e.index, e.sign), +1);
  return v;
}

namespace {

u64 class_size_clamped(int m, int w, u64 cap) {
  BigInt binom = 1;
  for (int i = 1; i <= w; ++i) binom = binom * (m - i + 1) / i;
  const BigInt size = binom << (w - 1);
  return size >= BigInt(cap) ? cap : static_cast<u64>(size);
}

SeedVector make_seed(const std::vector<std::uint32_t>& indices, u64 sign_bits) {
  SeedVector s;
  s.support.reserve(indices.size());
  s.support.push_back({indices[0], +1});
  for (std::size_t j = 1; j < indices.size(); ++j) {
    const bool neg = (sign_bits >> (j - 1)) & 1;
    s.support.push_back({indices[j], std::int8_t(neg ? -1 : +1)});
  }
  return s;
}

// Lexicographic scan of one weight class: combinations ascending, sign bits
// counted in binary, first sign pinned to +1. Returns false when the
// consumer is done.
bool scan_class_lex(int m, int w,
                    const std::function<bool(const SeedVector&)>& sink) {
  std::vector<std::uint32_t> idx(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) idx[std::size_t(i)] = std::uint32_t(i);
  const u64 patterns = u64(1) << (w - 1);
  for (;;) {
    for (u64 bits = 0; bits < patterns; ++bits)
      if (!sink(make_seed(idx, bits))) return false;
    int i = w - 1;
    while (i >= 0 && idx[std::size_t(i)] == std::uint32_t(m - w + i)) --i;
    if (i < 0) return true;
    ++idx[std::size_t(i)];
    for (int j = i + 1; j < w; ++j)
      idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
  }
}

// Uniform draw of `need` distinct seeds from the weight-w class. When most
// of the class is wanted the whole class is materialized and shuffled;
// otherwise rejection sampling keeps memory at O(need).
void emit_class_random(int m, int w, u64 need, u64 class_size, Rng& rng,
                       const std::function<void(const SeedVector&)>& emit) {
  if (need >= class_size / 2) {
    std::vector<SeedVector> all;
    all.reserve(class_size);
    scan_class_lex(m, w, [&](const SeedVector& s) {
      all.push_back(s);
      return true;
    });
    rng.shuffle(all);
    for (u64 i = 0; i < need; ++i) emit(all[i]);
    return;
  }
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::uint32_t> indices;
  u64 emitted = 0;
  while (emitted < need) {
    // Floyd's sampling of w distinct indices from [0, m)
    indices.clear();
    for (int j = m - w; j < m; ++j) {
      const std::uint32_t t = std::uint32_t(rng.below(u64(j) + 1));
      if (std::find(indices.begin(), indices.end(), t) != indices.end())
        indices.push_back(std::uint32_t(j));
      else
        indices.push_back(t);
    }
    std::sort(indices.begin(), indices.end());
    const u64 bits = w > 1 ? rng.below(u64(1) << (w - 1)) : 0;
    std::vector<std::uint32_t> key = indices;
    key.push_back(std::uint32_t(bits));
    key.push_back(std::uint32_t(bits >> 32));
    if (!seen.insert(key).second) continue;
    emit(make_seed(indices, bits));
    ++emitted;
  }
}

}  // namespace

void enumerate_seeds(int m, int k, u64 limit, SeedOrder order, u64 rng_seed,
                     const std::function<void(const SeedVector&)>& emit) {
  if (k < 1 || k >= m)
    throw std::invalid_argument("enumerate_seeds: need 1 <= k < m");
  if (limit < 1) throw std::invalid_argument("enumerate_seeds: limit must be positive");
  Rng rng(rng_seed);
  u64 remaining = limit;
  for (int w = 1; w <= k && remaining > 0; ++w) {
    const u64 class_size = class_size_clamped(m, w, kNoLimit);
    const u64 need = std::min(remaining, class_size);
    if (order == SeedOrder::lex) {
      u64 left = need;
      scan_class_lex(m, w, [&](const SeedVector& s) {
        emit(s);
        return --left > 0;
      });
    } else {
      emit_class_random(m, w, need, class_size, rng, emit);
    }
    remaining -= need;
  }
}

std::vector<SeedVector> collect_seeds(int m, int k, u64 limit, SeedOrder order,
                                      u64 rng_seed) {
  std::vector<SeedVector> out;
  enumerate_seeds(m, k, limit, order, rng_seed,
                  [&](const SeedVector& s) { out.push_back(s); });
  return out;
}

namespace {

void materialize_range(const std::vector<SeedVector>& seeds, std::size_t begin,
                       std::size_t end, const SisInstance& inst, Level0& out) {
  const u64 q = inst.q();
  const int n = inst.n();
  for (std::size_t i = begin; i < end; ++i) {
    TrackedRow row;
    row.residual.assign(std::size_t(n), 0);
    for (const auto& e : seeds[i].support) {
      const auto a_row = inst.row(int(e.index));
      if (e.sign > 0)
        for (int j = 0; j < n; ++j)
          row.residual[std::size_t(j)] = add_mod(row.residual[std::size_t(j)], a_row[j], q);
      else
        for (int j = 0; j < n; ++j)
          row.residual[std::size_t(j)] = sub_mod(row.residual[std::size_t(j)], a_row[j], q);
    }
    row.combo = seeds[i].to_combination();
    const bool zero = std::all_of(row.residual.begin(), row.residual.end(),
                                  [](u64 v) { return v == 0; });
    if (zero)
      out.immediate.push_back(std::move(row.combo));
    else
      out.rows.push_back(std::move(row));
  }
}

}  // namespace

Level0 materialize_level0(const std::vector<SeedVector>& seeds,
                          const SisInstance& inst, int threads) {
  for (const auto& s : seeds)
    for (const auto& e : s.support)
      if (e.index >= std::uint32_t(inst.m()))
        throw std::invalid_argument("materialize_level0: seed index out of range");
  if (threads < 1) threads = 1;
  if (threads == 1 || seeds.size() < 1024) {
    Level0 out;
    out.rows.reserve(seeds.size());
    materialize_range(seeds, 0, seeds.size(), inst, out);
    return out;
  }
  const std::size_t nchunks = std::size_t(threads);
  std::vector<Level0> parts(nchunks);
  std::vector<std::thread> workers;
  const std::size_t chunk = (seeds.size() + nchunks - 1) / nchunks;
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t b = c * chunk;
    const std::size_t e = std::min(seeds.size(), b + chunk);
    if (b >= e) break;
    workers.emplace_back(materialize_range, std::cref(seeds), b, e,
                         std::cref(inst), std::ref(parts[c]));
  }
  for (auto& w : workers) w.join();
  Level0 out;
  out.rows.reserve(seeds.size());
  for (auto& p : parts) {
    std::move(p.rows.begin(), p.rows.end(), std::back_inserter(out.rows));
    std::move(p.immediate.begin(), p.immediate.end(),
              std::back_inserter(out.immediate));
  }
  return out;
}

}  // namespace multisis
