#include "multisis/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace multisis {

BigInt capacity(int m, int k) {
  if (k < 1 || k >= m)
    throw std::domain_error("capacity: need 1 <= k < m");
  BigInt total = 0;
  BigInt binom = 1;  // C(m, i), updated incrementally
  BigInt pow2 = 1;   // 2^(i-1)
  for (int i = 1; i <= k; ++i) {
    binom = binom * (m - i + 1) / i;
    total += binom * pow2;
    pow2 <<= 1;
  }
  return total;
}

double gaussian_count_log(int m, double nu, int n, u64 q) {
  if (m < 1) throw std::domain_error("gaussian_count_log: m must be positive");
  if (!(nu > 0)) throw std::domain_error("gaussian_count_log: nu must be positive");
  if (n < 0) throw std::domain_error("gaussian_count_log: n must be nonnegative");
  const double half_m = double(m) / 2.0;
  return half_m * std::log(M_PI) + double(m) * std::log(nu) -
         std::lgamma(half_m + 1.0) - double(n) * std::log(double(q));
}

double pm1_count_log(int m, int d, int n, u64 q) {
  if (d < 1 || d >= m)
    throw std::domain_error("pm1_count_log: need 1 <= d < m");
  if (n < 0) throw std::domain_error("pm1_count_log: n must be nonnegative");
  return big_log(capacity(m, d)) - double(n) * std::log(double(q));
}

double predicted_cost_log(int n, u64 q, int t) {
  if (t < 1) throw std::domain_error("predicted_cost_log: t must be positive");
  return double(n) / double(t) * std::log(double(q));
}

double asymptotic_t(int n, int m, u64 q, double nu) {
  const double nlq = double(n) * std::log(double(q));
  const double delta = double(m) / nlq;
  const double eta = nu * nu / nlq;
  if (!(delta > 1.0))
    throw std::domain_error("asymptotic_t: delta <= 1, formula undefined");
  return std::log2(std::sqrt(eta * std::log(delta)));
}

bool HeuristicCounts::feasible_for(double target_count) const {
  const double need = std::log(target_count);
  return gaussian_log >= need || pm1_log >= need;
}

HeuristicCounts heuristic_counts(int m, double nu, int d, int n, u64 q) {
  return {gaussian_count_log(m, nu, n, q), pm1_count_log(m, d, n, q)};
}

namespace {

// Per-level row targets. Intermediate levels aim at the q^width scale with
// headroom, floored so small-modulus runs keep enough diversity, and always
// clamped by the memory budget.
constexpr u64 kLevelHeadroom = 16;
constexpr u64 kLevelFloor = 4096;

u64 clamp_big(const BigInt& v, u64 cap) {
  return v >= BigInt(cap) ? cap : static_cast<u64>(v);
}

std::vector<u64> level_targets(const Plan& plan, int m, u64 q, u64 target_count,
                               u64 max_rows) {
  std::vector<u64> targets(std::size_t(plan.t) + 1);
  targets[0] = clamp_big(capacity(m, plan.k), max_rows);
  for (int i = 1; i < plan.t; ++i) {
    const BigInt scale =
        kLevelHeadroom * big_pow(q, unsigned(plan.block_widths[std::size_t(i)]));
    targets[std::size_t(i)] =
        std::min<u64>(max_rows, std::max<u64>(std::min(kLevelFloor, max_rows),
                                              clamp_big(scale, max_rows)));
  }
  targets[std::size_t(plan.t)] = target_count;
  return targets;
}

}  // namespace

Plan plan_parameters(int n, int m, u64 q, double nu, u64 target_count,
                     u64 max_rows) {
  if (n < 1 || m <= n) throw std::invalid_argument("plan_parameters: need m > n >= 1");
  if (!valid_modulus(q))
    throw std::invalid_argument("plan_parameters: q must be a prime below 2^62");
  if (target_count < 1)
    throw std::invalid_argument("plan_parameters: target count must be positive");
  if (max_rows < 1)
    throw std::invalid_argument("plan_parameters: max_rows must be positive");
  if (!(nu >= 2.0)) throw InfeasibleError("infeasible: nu < 2 leaves no depth with d >= 2");

  // depth is capped at 30 so d = 2^t and the per-level norm bounds stay
  // comfortably inside 64-bit integers
  const int t_max =
      std::min({int(std::floor(std::log2(nu) + 1e-12)), n, 30});
  int best_t = 0, best_k = 0;
  for (int t = 1; t <= t_max; ++t) {
    const double per_level = nu / std::exp2(double(t));
    const int k = int(std::floor(per_level * per_level + 1e-12));
    if (k < 1 || k >= m) continue;
    const int s_ceil = (n + t - 1) / t;
    if (capacity(m, k) >= big_pow(q, unsigned(s_ceil))) {
      best_t = t;
      best_k = k;
    }
  }
  if (best_t == 0)
    throw InfeasibleError(
        "infeasible: capacity(m,k) < q^ceil(n/t) at every depth; instance is out "
        "of the heuristic range");

  Plan plan;
  plan.t = best_t;
  plan.k = best_k;
  plan.d = 1 << best_t;
  plan.s = (n + best_t - 1) / best_t;
  plan.nu = nu;
  plan.predicted_cost = predicted_cost_log(n, q, best_t);
  // Widths in {s, s-1}, wider blocks first, summing to n.
  const int wide = n - (plan.s - 1) * best_t;  // number of width-s blocks
  for (int i = 0; i < best_t; ++i)
    plan.block_widths.push_back(i < wide ? plan.s : plan.s - 1);
  plan.n_targets = level_targets(plan, m, q, target_count, max_rows);
  return plan;
}

bool plan_is_consistent(const Plan& plan, int n, int m, u64 q) {
  if (plan.t < 1 || plan.k < 1 || plan.k >= m) return false;
  if (plan.d != (1 << plan.t)) return false;
  if (int(plan.block_widths.size()) != plan.t) return false;
  int sum = 0;
  for (int w : plan.block_widths) {
    if (w < 1 || (w != plan.s && w != plan.s - 1)) return false;
    sum += w;
  }
  if (sum != n) return false;
  // 2^t sqrt(k) <= nu, squared to stay in integers on the left.
  const long double lhs = std::exp2l(2.0L * plan.t) * plan.k;
  if (lhs > (long double)(plan.nu) * plan.nu) return false;
  const int s_ceil = (n + plan.t - 1) / plan.t;
  if (capacity(m, plan.k) < big_pow(q, unsigned(s_ceil))) return false;
  if (plan.n_targets.size() != std::size_t(plan.t) + 1) return false;
  if (capacity(m, plan.k) < BigInt(plan.n_targets[0])) return false;
  return true;
}

}  // namespace multisis
