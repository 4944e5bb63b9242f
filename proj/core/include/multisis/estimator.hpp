#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "multisis/bigint.hpp"
#include "multisis/modarith.hpp"

namespace multisis {

// Raised when no merge depth satisfies the capacity inequality.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of distinct +-1-support vectors of length m and squared norm at
// most k, up to global sign: sum_{i=1}^{k} C(m,i) * 2^(i-1). Exact.
BigInt capacity(int m, int k);

// (m/2) ln pi + m ln nu - lgamma(m/2 + 1) - n ln q, the log of the
// ball-volume count. n = 0 treats the q^n divisor as 1.
double gaussian_count_log(int m, double nu, int n, u64 q);

// ln( sum_{r=1}^{d} C(m,r) 2^(r-1) ) - n ln q, numerator exact.
double pm1_count_log(int m, int d, int n, u64 q);

// (n / t) * ln q, the log-scale cost of a depth-t run.
double predicted_cost_log(int n, u64 q, int t);

// log2 sqrt(eta ln delta) with delta = m/(n ln q), eta = nu^2/(n ln q).
// An estimate only; throws std::domain_error when delta <= 1.
double asymptotic_t(int n, int m, u64 q, double nu);

struct HeuristicCounts {
  double gaussian_log;
  double pm1_log;

  bool feasible_for(double target_count) const;
};

// Both heuristic solution counts for a depth-d run; pm1_log requires d < m.
HeuristicCounts heuristic_counts(int m, double nu, int d, int n, u64 q);

// Derived run parameters: merge depth t, seed norm budget k, block layout,
// and per-level row targets.
struct Plan {
  int t = 0;                       // merge depth
  int k = 0;                       // seed squared-norm budget
  int d = 0;                       // 2^t
  int s = 0;                       // ceil(n / t)
  double nu = 0;                   // norm bound the run is verified against
  std::vector<int> block_widths;   // length t, sums to n, wider blocks first
  std::vector<u64> n_targets;      // length t+1, per-level row targets
  double predicted_cost = 0;       // (n/t) ln q
};

// Scans t = 1..min(floor(log2 nu), n), takes k = floor((nu/2^t)^2), and
// keeps the largest t with 1 <= k < m and capacity(m,k) >= q^ceil(n/t),
// the comparison done in exact big integers. Throws InfeasibleError when
// no depth works.
Plan plan_parameters(int n, int m, u64 q, double nu, u64 target_count,
                     u64 max_rows);

// Re-asserts the feasibility inequalities of a plan with big integers.
// Returns false instead of throwing; used by post-hoc checks.
bool plan_is_consistent(const Plan& plan, int n, int m, u64 q);

}  // namespace multisis
