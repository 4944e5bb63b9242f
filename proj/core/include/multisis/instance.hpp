#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "multisis/modarith.hpp"

namespace multisis {

// An m x n matrix over Z_q with q prime, m > n, and full column rank mod q.
// Entries are canonical residues in [0, q). Immutable after construction.
class SisInstance {
 public:
  // Validates the modulus, the shape, the entry range, and the rank.
  SisInstance(int n, int m, u64 q, std::vector<u64> entries);

  int n() const { return n_; }
  int m() const { return m_; }
  u64 q() const { return q_; }

  u64 at(int row, int col) const { return a_[std::size_t(row) * n_ + col]; }
  std::span<const u64> row(int r) const {
    return {a_.data() + std::size_t(r) * n_, std::size_t(n_)};
  }
  const std::vector<u64>& entries() const { return a_; }

  // FNV-1a over the header and entries; binds solution sets to this instance.
  u64 digest() const { return digest_; }

 private:
  int n_;
  int m_;
  u64 q_;
  std::vector<u64> a_;
  u64 digest_;
};

// Rank of an r x c residue matrix over the field Z_q (q prime), by exact
// Gauss elimination. Total on valid input.
int rank_mod_q(int rows, int cols, std::span<const u64> entries, u64 q);

// Uniform instance with full column rank; resamples whole matrices on rank
// failure. Deterministic for a fixed seed. The optional out-parameter
// reports how many draws were discarded.
SisInstance gen_instance(int n, int m, u64 q, u64 seed, int* resamples = nullptr);

// Integer combination vector over Z, stored sparsely as (index, coefficient)
// pairs with strictly increasing indices and nonzero coefficients. The
// squared Euclidean norm is cached.
class CombinationVector {
 public:
  struct Entry {
    std::uint32_t index;
    std::int32_t coeff;
    bool operator==(const Entry&) const = default;
  };

  CombinationVector() = default;

  static CombinationVector unit(std::uint32_t index, int sign);
  static CombinationVector from_dense(std::span<const i64> dense);

  const std::vector<Entry>& entries() const { return entries_; }
  u64 norm_sq() const { return norm_sq_; }
  bool is_zero() const { return entries_.empty(); }
  std::size_t weight() const { return entries_.size(); }

  // this + sign * other, with cancelling coefficients removed.
  CombinationVector combined(const CombinationVector& other, int sign) const;
  CombinationVector negated() const;

  // Representative of {v, -v} with positive leading coefficient.
  CombinationVector canonical() const;
  bool is_canonical() const;

  std::vector<i64> to_dense(int m) const;

  bool operator==(const CombinationVector& o) const { return entries_ == o.entries_; }
  bool operator<(const CombinationVector& o) const;

  struct Hash {
    std::size_t operator()(const CombinationVector& v) const;
  };

 private:
  std::vector<Entry> entries_;
  u64 norm_sq_ = 0;
};

using ComboSet = std::unordered_set<CombinationVector, CombinationVector::Hash>;

// (c * A) mod q with 128-bit accumulation; exact for any 62-bit q.
std::vector<u64> mat_vec_mod(const CombinationVector& c, const SisInstance& inst);

enum class VerifyStatus {
  ok,
  zero_vector,
  trivial_lattice_vector,
  norm_exceeded,
  residue_nonzero,
};

struct VerifyResult {
  bool valid;
  VerifyStatus status;
  const char* reason;  // names the first failed check; "ok" when valid
};

// Checks, in order: c nonzero; c not trivial (some entry not divisible by
// q); |c|^2 <= nu^2; c*A == 0 mod q.
VerifyResult verify_solution(const CombinationVector& c, const SisInstance& inst,
                             double nu);

// Deduplicated set of accepted combination vectors, bound to one instance.
// Members are stored in canonical sign form; insertion order is preserved,
// and sorted() gives a canonical order for file output.
class SolutionSet {
 public:
  explicit SolutionSet(const SisInstance& inst) : digest_(inst.digest()) {}

  // Inserts the canonical form; returns false on duplicate. The caller is
  // responsible for having verified the vector.
  bool insert(const CombinationVector& c);
  bool contains(const CombinationVector& c) const;

  std::size_t size() const { return ordered_.size(); }
  const std::vector<CombinationVector>& members() const { return ordered_; }
  std::vector<CombinationVector> sorted() const;  // by norm, then lex
  u64 instance_digest() const { return digest_; }

 private:
  u64 digest_;
  std::vector<CombinationVector> ordered_;
  ComboSet index_;
};

// Stacks a (nonzero mod q) target row a under A, giving the (m+1) x n
// homogeneous instance of the inhomogeneous problem.
SisInstance inhomogeneous_reduce(const SisInstance& inst, std::span<const u64> a);

struct InhomSolution {
  CombinationVector c;   // length-m combination for the original instance
  bool residual_ok;      // recomputed check of c*A == a mod q
};

// Searches single solutions and pairwise sums/differences of the reduced
// instance's solution set for vectors with last entry +-1, and rescales so
// that c*A == a mod q for the original m-row instance. The reduced instance
// must be the one the set was built on.
std::vector<InhomSolution> extract_inhomogeneous(const SolutionSet& sols,
                                                 const SisInstance& reduced,
                                                 std::size_t max_results = 1024);

}  // namespace multisis
