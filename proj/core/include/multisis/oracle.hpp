#pragma once

// Brute-force ground truth at desk scale. These enumerators are deliberately
// independent of the solver: they carry their own schoolbook mod-q dot
// product and never call into the merge engine, so agreement between the two
// sides is evidence rather than tautology.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "multisis/bigint.hpp"
#include "multisis/instance.hpp"

namespace multisis {

// Default cap on candidates an oracle call may examine. The `oracle` CLI
// subcommand lets MULTISIS_BUDGET override it.
inline constexpr u64 kDefaultOracleBudget = 100'000'000;

// Thrown when an enumeration would (or does) exceed its candidate budget.
// The message names the required count so the caller can raise the budget
// deliberately instead of by accident.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleReport {
  u64 exact_count = 0;     // solutions found, up to global sign
  double norm_bound = 0.0; // Euclidean bound the enumeration guarantees
  u64 enumerated = 0;      // complete candidate vectors examined
  double wall_seconds = 0.0;
};

struct OracleResult {
  OracleReport report;
  // Canonical representatives in deterministic enumeration order.
  std::vector<CombinationVector> solutions;
};

// Number of canonical {-1,0,1} vectors with 1..d nonzero entries out of m
// positions: sum_{r<=d} C(m,r) 2^(r-1). This is exactly the candidate count
// brute_force_pm1 will examine, computed in exact integers.
BigInt pm1_candidate_count(int m, int d);

// Exhaustively examines every canonical +-1-support vector of weight <= d and
// returns those annihilating the instance matrix mod q. Refuses up front if
// the candidate count exceeds `budget`. `threads` may parallelize the scan by
// leading support index; the result is identical for any thread count.
OracleResult brute_force_pm1(const SisInstance& inst, int d,
                             u64 budget = kDefaultOracleBudget,
                             int threads = 1);

// Exhaustively examines every nonzero integer vector with norm <= nu, up to
// global sign, by nested descent with radius pruning. Only sane for tiny
// dimensions; m is capped at 12. Throws BudgetError once the scan passes
// `budget` examined candidates.
OracleResult brute_force_ball(const SisInstance& inst, double nu,
                              u64 budget = kDefaultOracleBudget);

struct CrossReport {
  bool sound = true;          // every solver vector appears in the oracle list
  std::size_t matched = 0;    // solver vectors found in the oracle list
  std::size_t oracle_in_ball = 0; // oracle vectors with norm <= solver nu
  double recall = 0.0;        // matched / oracle_in_ball (0 when either is 0)
  std::vector<CombinationVector> missing; // solver vectors the oracle lacks
};

// Checks solver output against an exhaustive oracle list for the same
// instance. `oracle_bound` is the norm bound the list is exhaustive up to; it
// must cover the solver's nu or the comparison is vacuous and is rejected.
CrossReport cross_validate(const SolutionSet& solver_output,
                           const std::vector<CombinationVector>& oracle_list,
                           double oracle_bound, double solver_nu);

}  // namespace multisis
