#include "multisis/oracle.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>
#include <utility>

namespace multisis {

namespace {

// Independent modular helpers. The solver has its own versions; the oracle
// keeps separate ones on purpose so the two sides share no arithmetic code.
inline u64 ora_add(u64 a, u64 b, u64 q) { return (a + b) % q; }
inline u64 ora_sub(u64 a, u64 b, u64 q) { return (a + q - b) % q; }

inline bool all_zero(const std::vector<u64>& v) {
  for (u64 x : v)
    if (x != 0) return false;
  return true;
}

inline u64 isqrt_u64(u64 x) {
  u64 r = u64(std::sqrt(double(x)));
  while (r > 0 && r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Depth-first scan of canonical +-1 vectors whose leading support index is
// fixed. `acc` holds the running column sums mod q; every node of the tree is
// one complete candidate.
struct Pm1Task {
  const SisInstance* inst = nullptr;
  int d = 0;
  u64 enumerated = 0;
  std::vector<CombinationVector> found;

  std::vector<u64> acc;
  std::vector<i64> dense;

  void descend(int next_index, int weight) {
    const SisInstance& a = *inst;
    const u64 q = a.q();
    ++enumerated;
    if (all_zero(acc))
      found.push_back(CombinationVector::from_dense(dense));
    if (weight == d) return;
    for (int i = next_index; i < a.m(); ++i) {
      for (int sign : {+1, -1}) {
        for (int j = 0; j < a.n(); ++j)
          acc[std::size_t(j)] =
              sign > 0 ? ora_add(acc[std::size_t(j)], a.at(i, j), q)
                       : ora_sub(acc[std::size_t(j)], a.at(i, j), q);
        dense[std::size_t(i)] = sign;
        descend(i + 1, weight + 1);
        dense[std::size_t(i)] = 0;
        for (int j = 0; j < a.n(); ++j)
          acc[std::size_t(j)] =
              sign > 0 ? ora_sub(acc[std::size_t(j)], a.at(i, j), q)
                       : ora_add(acc[std::size_t(j)], a.at(i, j), q);
      }
    }
  }

  void run(int first) {
    const SisInstance& a = *inst;
    const u64 q = a.q();
    acc.assign(std::size_t(a.n()), 0);
    dense.assign(std::size_t(a.m()), 0);
    // Canonical form pins the leading coefficient to +1.
    for (int j = 0; j < a.n(); ++j)
      acc[std::size_t(j)] = a.at(first, j) % q;
    dense[std::size_t(first)] = 1;
    descend(first + 1, 1);
  }
};

}  // namespace

BigInt pm1_candidate_count(int m, int d) {
  if (m < 1) throw std::invalid_argument("pm1_candidate_count: m must be >= 1");
  if (d < 1) throw std::invalid_argument("pm1_candidate_count: d must be >= 1");
  if (d > m) d = m;
  BigInt total = 0;
  BigInt binom = 1;  // C(m, r) built up incrementally
  BigInt pow2 = 1;   // 2^(r-1)
  for (int r = 1; r <= d; ++r) {
    binom = binom * (m - r + 1) / r;
    total += binom * pow2;
    pow2 *= 2;
  }
  return total;
}

OracleResult brute_force_pm1(const SisInstance& inst, int d, u64 budget,
                             int threads) {
  if (d < 1) throw std::invalid_argument("brute_force_pm1: d must be >= 1");
  if (threads < 1)
    throw std::invalid_argument("brute_force_pm1: threads must be >= 1");
  if (d > inst.m()) d = inst.m();

  const BigInt required = pm1_candidate_count(inst.m(), d);
  if (required > BigInt(budget))
    throw BudgetError("oracle budget exceeded: the weight-" + std::to_string(d) +
                      " scan needs " + required.str() +
                      " candidates but the budget is " + std::to_string(budget));

  const auto t0 = std::chrono::steady_clock::now();
  const int m = inst.m();
  std::vector<Pm1Task> tasks(static_cast<std::size_t>(m));
  for (auto& t : tasks) {
    t.inst = &inst;
    t.d = d;
  }

  if (threads == 1 || m < 2) {
    for (int f = 0; f < m; ++f) tasks[std::size_t(f)].run(f);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int f = next.fetch_add(1);
        if (f >= m) return;
        tasks[std::size_t(f)].run(f);
      }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(threads, m);
    pool.reserve(std::size_t(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Stitch per-leading-index results back together in index order so the
  // output is byte-identical for any thread count.
  OracleResult out;
  for (const auto& t : tasks) {
    out.report.enumerated += t.enumerated;
    for (const auto& c : t.found) out.solutions.push_back(c);
  }
  out.report.exact_count = out.solutions.size();
  out.report.norm_bound = std::sqrt(double(d));
  out.report.wall_seconds = elapsed_since(t0);
  return out;
}

OracleResult brute_force_ball(const SisInstance& inst, double nu, u64 budget) {
  if (!(nu >= 0.0))
    throw std::invalid_argument("brute_force_ball: nu must be nonnegative");
  if (inst.m() > 12)
    throw std::invalid_argument(
        "brute_force_ball: ball enumeration is capped at m <= 12");

  const auto t0 = std::chrono::steady_clock::now();
  const int m = inst.m();
  const int n = inst.n();
  const u64 q = inst.q();
  // Integer norm budget; the small slack absorbs the float rounding of nu^2.
  const u64 r2 = u64(std::floor(double(nu) * double(nu) + 1e-9));

  OracleResult out;
  out.report.norm_bound = nu;

  std::vector<i64> dense(std::size_t(m), 0);
  std::vector<u64> acc(std::size_t(n), 0);

  // Fixes coordinates left to right. Until the first nonzero coordinate the
  // range is clamped to >= 0, which enumerates each +-v pair exactly once
  // with the canonical (leading coefficient positive) member.
  auto descend = [&](auto&& self, int i, u64 rem, bool nonzero) -> void {
    if (i == m) {
      if (!nonzero) return;  // skip the zero vector
      ++out.report.enumerated;
      if (out.report.enumerated > budget)
        throw BudgetError("oracle budget exceeded: ball scan passed " +
                          std::to_string(budget) + " candidates");
      if (all_zero(acc))
        out.solutions.push_back(CombinationVector::from_dense(dense));
      return;
    }
    const i64 limit = i64(isqrt_u64(rem));
    const i64 lo = nonzero ? -limit : 0;
    for (i64 c = lo; c <= limit; ++c) {
      dense[std::size_t(i)] = c;
      const u64 cmod = u64(((c % i64(q)) + i64(q)) % i64(q));
      for (int j = 0; j < n; ++j) {
        const unsigned __int128 term =
            (unsigned __int128)(cmod)*inst.at(i, j);
        acc[std::size_t(j)] =
            ora_add(acc[std::size_t(j)], u64(term % q), q);
      }
      self(self, i + 1, rem - u64(c * c), nonzero || c != 0);
      for (int j = 0; j < n; ++j) {
        const unsigned __int128 term =
            (unsigned __int128)(cmod)*inst.at(i, j);
        acc[std::size_t(j)] =
            ora_sub(acc[std::size_t(j)], u64(term % q), q);
      }
    }
    dense[std::size_t(i)] = 0;
  };
  descend(descend, 0, r2, false);

  out.report.exact_count = out.solutions.size();
  out.report.wall_seconds = elapsed_since(t0);
  return out;
}

CrossReport cross_validate(const SolutionSet& solver_output,
                           const std::vector<CombinationVector>& oracle_list,
                           double oracle_bound, double solver_nu) {
  if (oracle_bound + 1e-9 < solver_nu)
    throw std::invalid_argument(
        "cross_validate: oracle norm bound is below the solver's nu, the "
        "subset check would be vacuous");

  CrossReport rep;
  ComboSet oracle_set;
  const long double nu_sq = (long double)solver_nu * solver_nu;
  for (const auto& c : oracle_list) {
    const CombinationVector canon = c.canonical();
    if (oracle_set.insert(canon).second &&
        (long double)canon.norm_sq() <= nu_sq + 1e-9L)
      ++rep.oracle_in_ball;
  }
  for (const auto& c : solver_output.members()) {
    if (oracle_set.count(c.canonical()) != 0)
      ++rep.matched;
    else
      rep.missing.push_back(c);
  }
  rep.sound = rep.missing.empty();
  rep.recall = rep.oracle_in_ball == 0
                   ? 0.0
                   : double(rep.matched) / double(rep.oracle_in_ball);
  return rep;
}

}  // namespace multisis
