#include "multisis/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "multisis/rng.hpp"

namespace multisis {

namespace {

u64 fnv1a(u64 h, u64 v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

u64 instance_digest(int n, int m, u64 q, const std::vector<u64>& a) {
  u64 h = 14695981039346656037ull;
  h = fnv1a(h, u64(n));
  h = fnv1a(h, u64(m));
  h = fnv1a(h, q);
  for (u64 v : a) h = fnv1a(h, v);
  return h;
}

}  // namespace

SisInstance::SisInstance(int n, int m, u64 q, std::vector<u64> entries)
    : n_(n), m_(m), q_(q), a_(std::move(entries)) {
  if (n < 1) throw std::invalid_argument("SisInstance: n must be positive");
  if (m <= n) throw std::invalid_argument("SisInstance: m must exceed n");
  if (!valid_modulus(q))
    throw std::invalid_argument("SisInstance: q must be a prime below 2^62");
  if (a_.size() != std::size_t(m) * std::size_t(n))
    throw std::invalid_argument("SisInstance: entry count does not match m*n");
  for (u64 v : a_)
    if (v >= q) throw std::invalid_argument("SisInstance: entry out of [0, q)");
  if (rank_mod_q(m_, n_, a_, q_) != n_)
    throw std::invalid_argument("SisInstance: matrix is not of rank n mod q");
  digest_ = instance_digest(n_, m_, q_, a_);
}

int rank_mod_q(int rows, int cols, std::span<const u64> entries, u64 q) {
  if (entries.size() != std::size_t(rows) * std::size_t(cols))
    throw std::invalid_argument("rank_mod_q: bad entry count");
  std::vector<u64> w(entries.begin(), entries.end());
  auto at = [&](int r, int c) -> u64& { return w[std::size_t(r) * cols + c]; };
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (at(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    for (int c = col; c < cols; ++c) std::swap(at(rank, c), at(pivot, c));
    const u64 inv = inv_mod(at(rank, col), q);
    for (int c = col; c < cols; ++c) at(rank, c) = mul_mod(at(rank, c), inv, q);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || at(r, col) == 0) continue;
      const u64 f = at(r, col);
      for (int c = col; c < cols; ++c)
        at(r, c) = sub_mod(at(r, c), mul_mod(f, at(rank, c), q), q);
    }
    ++rank;
  }
  return rank;
}

SisInstance gen_instance(int n, int m, u64 q, u64 seed, int* resamples) {
  if (!valid_modulus(q))
    throw std::invalid_argument("gen_instance: q must be a prime below 2^62");
  if (n < 1 || m <= n)
    throw std::invalid_argument("gen_instance: need m > n >= 1");
  Rng rng(seed);
  int discarded = 0;
  for (;;) {
    std::vector<u64> a(std::size_t(m) * std::size_t(n));
    for (u64& v : a) v = rng.below(q);
    if (rank_mod_q(m, n, a, q) == n) {
      if (resamples) *resamples = discarded;
      return SisInstance(n, m, q, std::move(a));
    }
    ++discarded;
  }
}

CombinationVector CombinationVector::unit(std::uint32_t index, int sign) {
  CombinationVector v;
  v.entries_.push_back({index, sign >= 0 ? 1 : -1});
  v.norm_sq_ = 1;
  return v;
}

CombinationVector CombinationVector::from_dense(std::span<const i64> dense) {
  CombinationVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] == 0) continue;
    if (dense[i] > std::numeric_limits<std::int32_t>::max() ||
        dense[i] < std::numeric_limits<std::int32_t>::min())
      throw std::invalid_argument("CombinationVector: coefficient exceeds 32 bits");
    v.entries_.push_back({std::uint32_t(i), std::int32_t(dense[i])});
    v.norm_sq_ += u64(dense[i] * dense[i]);
  }
  return v;
}

CombinationVector CombinationVector::combined(const CombinationVector& other,
                                              int sign) const {
  CombinationVector out;
  out.entries_.reserve(entries_.size() + other.entries_.size());
  std::size_t i = 0, j = 0;
  while (i < entries_.size() || j < other.entries_.size()) {
    if (j == other.entries_.size() ||
        (i < entries_.size() && entries_[i].index < other.entries_[j].index)) {
      out.entries_.push_back(entries_[i++]);
    } else if (i == entries_.size() || other.entries_[j].index < entries_[i].index) {
      Entry e = other.entries_[j++];
      e.coeff = std::int32_t(sign * e.coeff);
      out.entries_.push_back(e);
    } else {
      const std::int32_t c = entries_[i].coeff + sign * other.entries_[j].coeff;
      if (c != 0) out.entries_.push_back({entries_[i].index, c});
      ++i;
      ++j;
    }
  }
  for (const Entry& e : out.entries_)
    out.norm_sq_ += u64(i64(e.coeff) * i64(e.coeff));
  return out;
}

CombinationVector CombinationVector::negated() const {
  CombinationVector out = *this;
  for (Entry& e : out.entries_) e.coeff = -e.coeff;
  return out;
}

CombinationVector CombinationVector::canonical() const {
  if (entries_.empty() || entries_.front().coeff > 0) return *this;
  return negated();
}

bool CombinationVector::is_canonical() const {
  return entries_.empty() || entries_.front().coeff > 0;
}

std::vector<i64> CombinationVector::to_dense(int m) const {
  std::vector<i64> d(std::size_t(m), 0);
  for (const Entry& e : entries_) d.at(e.index) = e.coeff;
  return d;
}

bool CombinationVector::operator<(const CombinationVector& o) const {
  return std::lexicographical_compare(
      entries_.begin(), entries_.end(), o.entries_.begin(), o.entries_.end(),
      [](const Entry& a, const Entry& b) {
        if (a.index != b.index) return a.index < b.index;
        return a.coeff < b.coeff;
      });
}

std::size_t CombinationVector::Hash::operator()(const CombinationVector& v) const {
  u64 h = 14695981039346656037ull;
  for (const Entry& e : v.entries()) {
    h ^= (u64(e.index) << 32) ^ u64(std::uint32_t(e.coeff));
    h *= 1099511628211ull;
  }
  return std::size_t(h);
}

std::vector<u64> mat_vec_mod(const CombinationVector& c, const SisInstance& inst) {
  for (const auto& e : c.entries())
    if (e.index >= std::uint32_t(inst.m()))
      throw std::invalid_argument("mat_vec_mod: combination index out of range");
  const u64 q = inst.q();
  std::vector<u64> out(std::size_t(inst.n()), 0);
  for (const auto& e : c.entries()) {
    const u64 coeff = residue_of(e.coeff, q);
    if (coeff == 0) continue;
    const auto row = inst.row(int(e.index));
    for (int j = 0; j < inst.n(); ++j) {
      const u64 prod = mul_mod(coeff, row[j], q);
      out[j] = add_mod(out[j], prod, q);
    }
  }
  return out;
}

VerifyResult verify_solution(const CombinationVector& c, const SisInstance& inst,
                             double nu) {
  if (c.is_zero())
    return {false, VerifyStatus::zero_vector, "zero vector"};
  bool all_multiples_of_q = true;
  for (const auto& e : c.entries())
    if (residue_of(e.coeff, inst.q()) != 0) {
      all_multiples_of_q = false;
      break;
    }
  if (all_multiples_of_q)
    return {false, VerifyStatus::trivial_lattice_vector, "trivial lattice vector"};
  const long double bound = static_cast<long double>(nu) * static_cast<long double>(nu);
  if (static_cast<long double>(c.norm_sq()) > bound)
    return {false, VerifyStatus::norm_exceeded, "norm exceeds bound"};
  for (u64 v : mat_vec_mod(c, inst))
    if (v != 0)
      return {false, VerifyStatus::residue_nonzero, "residue nonzero mod q"};
  return {true, VerifyStatus::ok, "ok"};
}

bool SolutionSet::insert(const CombinationVector& c) {
  CombinationVector canon = c.canonical();
  if (canon.is_zero())
    throw std::invalid_argument("SolutionSet: refusing the zero vector");
  if (index_.contains(canon)) return false;
  index_.insert(canon);
  ordered_.push_back(std::move(canon));
  return true;
}

bool SolutionSet::contains(const CombinationVector& c) const {
  return index_.contains(c.canonical());
}

std::vector<CombinationVector> SolutionSet::sorted() const {
  std::vector<CombinationVector> out = ordered_;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.norm_sq() != b.norm_sq()) return a.norm_sq() < b.norm_sq();
    return a < b;
  });
  return out;
}

SisInstance inhomogeneous_reduce(const SisInstance& inst, std::span<const u64> a) {
  if (a.size() != std::size_t(inst.n()))
    throw std::invalid_argument("inhomogeneous_reduce: target length mismatch");
  bool nonzero = false;
  for (u64 v : a) {
    if (v >= inst.q())
      throw std::invalid_argument("inhomogeneous_reduce: entry out of [0, q)");
    if (v % inst.q() != 0) nonzero = true;
  }
  if (!nonzero)
    throw std::invalid_argument("inhomogeneous_reduce: target is zero mod q");
  std::vector<u64> entries = inst.entries();
  entries.insert(entries.end(), a.begin(), a.end());
  return SisInstance(inst.n(), inst.m() + 1, inst.q(), std::move(entries));
}

namespace {

// c restricted to the first m rows of the reduced instance, rescaled so the
// combination hits +a instead of -last*a.
CombinationVector strip_last(const CombinationVector& c, std::uint32_t last_index,
                             int last_coeff) {
  std::vector<i64> dense(last_index + 1, 0);
  for (const auto& e : c.entries()) dense[e.index] = e.coeff;
  dense[last_index] = 0;
  CombinationVector out = CombinationVector::from_dense(dense);
  return last_coeff == 1 ? out.negated() : out;
}

int last_coeff_of(const CombinationVector& c, std::uint32_t last_index) {
  const auto& es = c.entries();
  if (!es.empty() && es.back().index == last_index) return es.back().coeff;
  return 0;
}

}  // namespace

std::vector<InhomSolution> extract_inhomogeneous(const SolutionSet& sols,
                                                 const SisInstance& reduced,
                                                 std::size_t max_results) {
  if (sols.instance_digest() != reduced.digest())
    throw std::invalid_argument(
        "extract_inhomogeneous: solution set is not bound to this instance");
  const std::uint32_t last = std::uint32_t(reduced.m() - 1);
  const u64 q = reduced.q();
  std::span<const u64> a = reduced.row(reduced.m() - 1);

  std::vector<InhomSolution> out;
  ComboSet seen;
  auto check_against_a = [&](const CombinationVector& c) {
    // schoolbook c*A over the first m rows, compared to a
    std::vector<u64> acc(std::size_t(reduced.n()), 0);
    for (const auto& e : c.entries()) {
      const u64 coeff = residue_of(e.coeff, q);
      for (int j = 0; j < reduced.n(); ++j)
        acc[j] = add_mod(acc[j], mul_mod(coeff, reduced.at(int(e.index), j), q), q);
    }
    for (int j = 0; j < reduced.n(); ++j)
      if (acc[j] != a[j]) return false;
    return true;
  };
  auto consider = [&](const CombinationVector& full, int e) {
    if (e != 1 && e != -1) return;
    CombinationVector c = strip_last(full, last, e);
    if (c.is_zero()) return;
    if (!seen.insert(c.canonical()).second) return;
    out.push_back({c, check_against_a(c)});
  };

  const auto& members = sols.members();
  for (const auto& s : members) {
    if (out.size() >= max_results) return out;
    consider(s, last_coeff_of(s, last));
  }
  for (std::size_t i = 0; i < members.size() && out.size() < max_results; ++i) {
    for (std::size_t j = i + 1; j < members.size() && out.size() < max_results; ++j) {
      for (int sign : {+1, -1}) {
        CombinationVector comb = members[i].combined(members[j], sign);
        consider(comb, last_coeff_of(comb, last));
      }
    }
  }
  return out;
}

}  // namespace multisis
