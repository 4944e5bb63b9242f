// Command-line front end: generate / estimate / solve / verify / oracle /
// bench. Everything a run needs to be reproduced (resolved flags, seeds) is
// logged to stderr; stdout and output files carry only deterministic payload.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 infeasible plan,
// 3 starvation, 4 verification failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "multisis/estimator.hpp"
#include "multisis/io.hpp"
#include "multisis/merge.hpp"
#include "multisis/oracle.hpp"
#include "multisis/seeds.hpp"

namespace {

using namespace multisis;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitStarved = 3;
constexpr int kExitVerifyFailed = 4;

struct GenerateCfg {
  int n = 0;
  int m = 0;
  u64 q = 0;
  u64 seed = 0;
  std::string out;
};

struct EstimateCfg {
  int n = 0;
  int m = 0;
  u64 q = 0;
  double nu = 0;
  u64 count = 1;
  u64 max_rows = u64(1) << 17;
  bool json = false;
};

struct SolveCfg {
  std::string instance;
  std::string out;
  std::string stats;
  double nu = 0;
  u64 count = 1;
  u64 max_rows = u64(1) << 17;
  u64 seed = 0;
  std::string seed_order = "random";
  bool no_prune = false;
  bool paranoid = false;
  int threads = 1;
};

struct VerifyCfg {
  std::string instance;
  std::string solutions;
  double nu = 0;
};

struct OracleCfg {
  std::string instance;
  std::string mode;
  int d = 0;
  double nu = -1.0;
  u64 budget = kDefaultOracleBudget;
  bool budget_from_flag = false;
  std::string out;
  int threads = 1;
};

struct BenchCfg {
  std::vector<std::string> points;
  std::string out;
  u64 seed = 0;
  u64 max_rows = u64(1) << 17;
  std::string seed_order = "random";
  int threads = 1;
  bool wall_time = true;
};

SeedOrder parse_seed_order(const std::string& s) {
  if (s == "lex") return SeedOrder::lex;
  if (s == "random") return SeedOrder::random;
  throw std::invalid_argument("seed order must be 'lex' or 'random'");
}

int run_generate(const GenerateCfg& cfg) {
  std::cerr << "config: generate n=" << cfg.n << " m=" << cfg.m
            << " q=" << cfg.q << " seed=" << cfg.seed << " out=" << cfg.out
            << "\n";
  int resamples = 0;
  SisInstance inst = gen_instance(cfg.n, cfg.m, cfg.q, cfg.seed, &resamples);
  write_instance_file(cfg.out, inst);
  std::cerr << "generated " << cfg.out << " (digest " << inst.digest()
            << ", rank resamples " << resamples << ")\n";
  return kExitOk;
}

int run_estimate(const EstimateCfg& cfg) {
  std::cerr << "config: estimate n=" << cfg.n << " m=" << cfg.m
            << " q=" << cfg.q << " nu=" << cfg.nu << " count=" << cfg.count
            << " max-rows=" << cfg.max_rows << " json=" << cfg.json << "\n";
  if (!valid_modulus(cfg.q))
    throw std::invalid_argument("estimate: q must be a prime below 2^62");

  Plan plan;
  try {
    plan = plan_parameters(cfg.n, cfg.m, cfg.q, cfg.nu, cfg.count,
                           cfg.max_rows);
  } catch (const InfeasibleError& e) {
    if (cfg.json) {
      nlohmann::json j;
      j["feasible"] = false;
      j["error"] = e.what();
      std::cout << j.dump(2) << "\n";
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }

  const BigInt cap = capacity(cfg.m, plan.k);
  // The +-1 heuristic needs weight < m; clamp for display on tiny m.
  const int d_eff = std::min(plan.d, cfg.m - 1);
  const HeuristicCounts counts =
      heuristic_counts(cfg.m, plan.nu, d_eff, cfg.n, cfg.q);
  std::optional<double> asym;
  try {
    asym = asymptotic_t(cfg.n, cfg.m, cfg.q, cfg.nu);
  } catch (const std::domain_error&) {
    asym.reset();
  }
  const double cost_log2 = plan.predicted_cost / std::log(2.0);

  if (cfg.json) {
    nlohmann::json j;
    j["feasible"] = true;
    j["n"] = cfg.n;
    j["m"] = cfg.m;
    j["q"] = cfg.q;
    j["nu"] = cfg.nu;
    j["count"] = cfg.count;
    j["max_rows"] = cfg.max_rows;
    j["t"] = plan.t;
    j["k"] = plan.k;
    j["s"] = plan.s;
    j["d"] = plan.d;
    j["block_widths"] = plan.block_widths;
    j["n_targets"] = plan.n_targets;
    j["capacity"] = cap.str();
    j["predicted_cost_ln"] = plan.predicted_cost;
    j["predicted_cost_log2"] = cost_log2;
    j["gaussian_log"] = counts.gaussian_log;
    j["pm1_log"] = counts.pm1_log;
    if (asym)
      j["asymptotic_t"] = *asym;
    else
      j["asymptotic_t"] = nullptr;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  std::cout << "t                   " << plan.t << "\n";
  std::cout << "k                   " << plan.k << "\n";
  std::cout << "s                   " << plan.s << "\n";
  std::cout << "d                   " << plan.d << "\n";
  std::cout << "capacity(m,k)       " << cap.str() << "\n";
  std::cout << "predicted log2 cost " << cost_log2 << "\n";
  std::cout << "gaussian log count  " << counts.gaussian_log << "\n";
  std::cout << "pm1 log count       " << counts.pm1_log << "\n";
  std::cout << "asymptotic t        ";
  if (asym)
    std::cout << *asym << "\n";
  else
    std::cout << "n/a\n";
  return kExitOk;
}

void write_stats_csv(const std::string& path, const SolveStats& stats) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open stats file: " + path);
  os << "level,rows_in,groups,pairs,zeros,rows_out,max_norm_sq\n";
  for (const auto& l : stats.levels)
    os << l.level << ',' << l.rows_in << ',' << l.groups << ',' << l.pairs
       << ',' << l.zeros << ',' << l.rows_out << ',' << l.max_norm_sq << "\n";
}

int run_solve(const SolveCfg& cfg) {
  std::cerr << "config: solve instance=" << cfg.instance << " out=" << cfg.out
            << " nu=" << cfg.nu << " count=" << cfg.count
            << " max-rows=" << cfg.max_rows << " seed=" << cfg.seed
            << " seed-order=" << cfg.seed_order
            << " prune=" << (cfg.no_prune ? 0 : 1)
            << " paranoid=" << cfg.paranoid << " threads=" << cfg.threads
            << " stats=" << (cfg.stats.empty() ? "-" : cfg.stats) << "\n";

  SisInstance inst = read_instance_file(cfg.instance);
  Plan plan;
  try {
    plan = plan_parameters(inst.n(), inst.m(), inst.q(), cfg.nu, cfg.count,
                           cfg.max_rows);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
  std::cerr << "plan: t=" << plan.t << " k=" << plan.k << " s=" << plan.s
            << " d=" << plan.d << "\n";

  SolveOptions opts;
  opts.target_count = cfg.count;
  opts.max_rows = cfg.max_rows;
  opts.seed_order = parse_seed_order(cfg.seed_order);
  opts.rng_seed = cfg.seed;
  opts.prune = !cfg.no_prune;
  opts.paranoid = cfg.paranoid;
  opts.threads = cfg.threads;

  SolveOutcome outcome = solve(inst, plan, opts);

  // Every emitted row has passed verification inside the solver; write the
  // file before deciding the exit code so starvation still leaves partials.
  write_solutions_file(cfg.out, inst.m(), outcome.solutions.sorted());
  if (!cfg.stats.empty()) write_stats_csv(cfg.stats, outcome.stats);

  std::cerr << "seeds used " << outcome.stats.seeds_used << ", immediate "
            << outcome.stats.immediate_solutions << ", solutions "
            << outcome.solutions.size() << "/" << cfg.count << "\n";
  for (const auto& l : outcome.stats.levels)
    std::cerr << "level " << l.level << ": rows_in=" << l.rows_in
              << " groups=" << l.groups << " pairs=" << l.pairs
              << " zeros=" << l.zeros << " rows_out=" << l.rows_out
              << " max_norm_sq=" << l.max_norm_sq << "\n";

  if (!outcome.reached(cfg.count)) {
    if (outcome.starved && outcome.starved_level >= 0)
      std::cerr << "starved at level " << outcome.starved_level << ": wrote "
                << outcome.solutions.size() << " of " << cfg.count
                << " requested solutions\n";
    else
      std::cerr << "starved: wrote " << outcome.solutions.size() << " of "
                << cfg.count << " requested solutions\n";
    return kExitStarved;
  }
  return kExitOk;
}

int run_verify(const VerifyCfg& cfg) {
  std::cerr << "config: verify instance=" << cfg.instance
            << " solutions=" << cfg.solutions << " nu=" << cfg.nu << "\n";
  SisInstance inst = read_instance_file(cfg.instance);
  SolutionFile sols = read_solutions_file(cfg.solutions);
  if (sols.m != inst.m())
    throw std::runtime_error("verify: solution width " +
                             std::to_string(sols.m) +
                             " does not match instance m " +
                             std::to_string(inst.m()));

  std::size_t failed = 0;
  ComboSet seen;
  std::vector<std::size_t> first_row;  // canonical index -> first row number
  std::vector<CombinationVector> canon_order;
  for (std::size_t i = 0; i < sols.rows.size(); ++i) {
    std::string verdict = "ok";
    try {
      const CombinationVector c = CombinationVector::from_dense(sols.rows[i]);
      const VerifyResult res = verify_solution(c, inst, cfg.nu);
      if (!res.valid) {
        verdict = std::string("FAIL (") + res.reason + ")";
      } else {
        const CombinationVector canon = c.canonical();
        if (!seen.insert(canon).second) {
          std::size_t j = 0;
          for (; j < canon_order.size(); ++j)
            if (canon_order[j] == canon) break;
          verdict = "FAIL (duplicate of row " + std::to_string(first_row[j]) +
                    ")";
        } else {
          canon_order.push_back(canon);
          first_row.push_back(i);
        }
      }
    } catch (const std::invalid_argument& e) {
      verdict = std::string("FAIL (") + e.what() + ")";
    }
    if (verdict != "ok") ++failed;
    std::cout << "row " << i << ": " << verdict << "\n";
  }
  std::cout << "verified " << (sols.rows.size() - failed) << "/"
            << sols.rows.size() << " rows\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

int run_oracle(const OracleCfg& cfg_in) {
  OracleCfg cfg = cfg_in;
  const char* env = std::getenv("MULTISIS_BUDGET");
  if (env != nullptr && *env != '\0') {
    // The environment variable overrides the budget, flag included.
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0')
      throw std::invalid_argument("MULTISIS_BUDGET is not a base-10 integer");
    cfg.budget = u64(v);
    std::cerr << "budget " << cfg.budget << " (from MULTISIS_BUDGET)\n";
  }
  std::cerr << "config: oracle instance=" << cfg.instance
            << " mode=" << cfg.mode << " d=" << cfg.d << " nu=" << cfg.nu
            << " budget=" << cfg.budget << " threads=" << cfg.threads
            << " out=" << (cfg.out.empty() ? "-" : cfg.out) << "\n";

  SisInstance inst = read_instance_file(cfg.instance);
  OracleResult result;
  if (cfg.mode == "pm1") {
    if (cfg.d < 1)
      throw std::invalid_argument("oracle: --mode pm1 requires --d >= 1");
    result = brute_force_pm1(inst, cfg.d, cfg.budget, cfg.threads);
  } else if (cfg.mode == "ball") {
    if (cfg.nu < 0)
      throw std::invalid_argument("oracle: --mode ball requires --nu >= 0");
    result = brute_force_ball(inst, cfg.nu, cfg.budget);
  } else {
    throw std::invalid_argument("oracle: --mode must be pm1 or ball");
  }

  std::cout << "mode " << cfg.mode << "\n";
  std::cout << "exact_count " << result.report.exact_count << "\n";
  std::cout << "enumerated " << result.report.enumerated << "\n";
  std::cout << "norm_bound " << result.report.norm_bound << "\n";
  std::cerr << "wall seconds " << result.report.wall_seconds << "\n";

  if (!cfg.out.empty())
    write_solutions_file(cfg.out, inst.m(), result.solutions);
  return kExitOk;
}

struct BenchPoint {
  int n = 0;
  int m = 0;
  u64 q = 0;
  double nu = 0;
  u64 count = 1;
};

BenchPoint parse_point(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) parts.push_back(cur);
  if (parts.size() != 4 && parts.size() != 5)
    throw std::invalid_argument("bench point must be n,m,q,nu[,count]: " +
                                text);
  BenchPoint p;
  try {
    p.n = std::stoi(parts[0]);
    p.m = std::stoi(parts[1]);
    p.q = u64(std::stoull(parts[2]));
    p.nu = std::stod(parts[3]);
    if (parts.size() == 5) p.count = u64(std::stoull(parts[4]));
  } catch (const std::exception&) {
    throw std::invalid_argument("bench point must be n,m,q,nu[,count]: " +
                                text);
  }
  return p;
}

int run_bench(const BenchCfg& cfg) {
  std::cerr << "config: bench points=" << cfg.points.size()
            << " out=" << (cfg.out.empty() ? "-" : cfg.out)
            << " seed=" << cfg.seed << " max-rows=" << cfg.max_rows
            << " seed-order=" << cfg.seed_order << " threads=" << cfg.threads
            << " wall-time=" << cfg.wall_time << "\n";
  if (cfg.points.empty())
    throw std::invalid_argument("bench: at least one --point is required");

  std::string header =
      "n,m,q,nu,count,t,k,seeds,rows_processed,solutions,"
      "predicted_ln_cost,measured_ln_work";
  if (cfg.wall_time) header += ",wall_seconds";

  std::ostringstream rows;
  for (std::size_t idx = 0; idx < cfg.points.size(); ++idx) {
    const BenchPoint p = parse_point(cfg.points[idx]);
    Plan plan;
    try {
      plan = plan_parameters(p.n, p.m, p.q, p.nu, p.count, cfg.max_rows);
    } catch (const InfeasibleError& e) {
      std::cerr << "error: point " << cfg.points[idx] << ": " << e.what()
                << "\n";
      return kExitInfeasible;
    }

    // Deterministic per-point instance seed, stride chosen to keep points
    // independent while a rerun reproduces the file byte for byte.
    const u64 inst_seed = cfg.seed + 7919 * u64(idx);
    SisInstance inst = gen_instance(p.n, p.m, p.q, inst_seed);

    SolveOptions opts;
    opts.target_count = p.count;
    opts.max_rows = cfg.max_rows;
    opts.seed_order = parse_seed_order(cfg.seed_order);
    opts.rng_seed = cfg.seed;
    opts.threads = cfg.threads;

    const auto t0 = std::chrono::steady_clock::now();
    SolveOutcome outcome = solve(inst, plan, opts);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const u64 work = outcome.stats.rows_processed();
    const double ln_work = work > 0 ? std::log(double(work)) : 0.0;

    rows << p.n << ',' << p.m << ',' << p.q << ',' << p.nu << ',' << p.count
         << ',' << plan.t << ',' << plan.k << ','
         << outcome.stats.seeds_used << ',' << work << ','
         << outcome.solutions.size() << ',' << plan.predicted_cost << ','
         << ln_work;
    if (cfg.wall_time) rows << ',' << wall;
    rows << "\n";

    std::cerr << "point " << cfg.points[idx] << ": t=" << plan.t
              << " k=" << plan.k << " solutions=" << outcome.solutions.size()
              << " rows=" << work << "\n";
  }

  if (cfg.out.empty()) {
    std::cout << header << "\n" << rows.str();
  } else {
    const bool fresh = [&] {
      std::ifstream probe(cfg.out, std::ios::binary);
      return !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
    }();
    std::ofstream os(cfg.out, std::ios::binary | std::ios::app);
    if (!os) throw std::runtime_error("cannot open bench csv: " + cfg.out);
    if (fresh) os << header << "\n";
    os << rows.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MultiSIS sort-and-merge solver"};
  app.require_subcommand(1);

  GenerateCfg gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate a random instance");
  cmd_gen->add_option("-n", gen.n, "Number of columns")->required();
  cmd_gen->add_option("-m", gen.m, "Number of rows")->required();
  cmd_gen->add_option("-q", gen.q, "Prime modulus")->required();
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("-o,--out", gen.out, "Output instance file")->required();

  EstimateCfg est;
  auto* cmd_est = app.add_subcommand("estimate", "Plan parameters and counts");
  cmd_est->add_option("-n", est.n, "Number of columns")->required();
  cmd_est->add_option("-m", est.m, "Number of rows")->required();
  cmd_est->add_option("-q", est.q, "Prime modulus")->required();
  cmd_est->add_option("--nu", est.nu, "Norm bound")->required();
  cmd_est->add_option("--count", est.count, "Requested solutions");
  cmd_est->add_option("--max-rows", est.max_rows, "Per-level row cap");
  cmd_est->add_flag("--json", est.json, "Machine-readable output");

  SolveCfg sol;
  auto* cmd_sol = app.add_subcommand("solve", "Run the sort-and-merge solver");
  cmd_sol->add_option("--instance", sol.instance, "Instance file")->required();
  cmd_sol->add_option("-o,--out", sol.out, "Output solution file")->required();
  cmd_sol->add_option("--nu", sol.nu, "Norm bound")->required();
  cmd_sol->add_option("--count", sol.count, "Solutions to find");
  cmd_sol->add_option("--max-rows", sol.max_rows, "Per-level row cap");
  cmd_sol->add_option("--seed", sol.seed, "RNG seed");
  cmd_sol->add_option("--seed-order", sol.seed_order,
                      "Seed enumeration order: lex or random");
  cmd_sol->add_flag("--no-prune", sol.no_prune,
                    "Keep rows above the norm bound during merging");
  cmd_sol->add_flag("--paranoid", sol.paranoid,
                    "Recompute residuals from combos at every level");
  cmd_sol->add_option("--threads", sol.threads, "Worker threads");
  cmd_sol->add_option("--stats", sol.stats, "Per-level stats CSV");

  VerifyCfg ver;
  auto* cmd_ver = app.add_subcommand("verify", "Check a solution file");
  cmd_ver->add_option("--instance", ver.instance, "Instance file")->required();
  cmd_ver->add_option("--solutions", ver.solutions, "Solution file")
      ->required();
  cmd_ver->add_option("--nu", ver.nu, "Norm bound")->required();

  OracleCfg ora;
  auto* cmd_ora = app.add_subcommand("oracle", "Brute-force enumeration");
  cmd_ora->add_option("--instance", ora.instance, "Instance file")->required();
  cmd_ora->add_option("--mode", ora.mode, "pm1 or ball")->required();
  cmd_ora->add_option("--d", ora.d, "Weight bound (pm1 mode)");
  cmd_ora->add_option("--nu", ora.nu, "Norm bound (ball mode)");
  cmd_ora->add_option("--budget", ora.budget, "Candidate budget");
  cmd_ora->add_option("--out", ora.out, "Write found solutions here");
  cmd_ora->add_option("--threads", ora.threads, "Worker threads (pm1 mode)");

  BenchCfg ben;
  auto* cmd_ben = app.add_subcommand("bench", "Sweep a parameter grid");
  cmd_ben->add_option("--point", ben.points,
                      "Grid point n,m,q,nu[,count]; repeatable");
  cmd_ben->add_option("--out", ben.out, "CSV to append to (stdout if absent)");
  cmd_ben->add_option("--seed", ben.seed, "RNG seed");
  cmd_ben->add_option("--max-rows", ben.max_rows, "Per-level row cap");
  cmd_ben->add_option("--seed-order", ben.seed_order,
                      "Seed enumeration order: lex or random");
  cmd_ben->add_option("--threads", ben.threads, "Worker threads");
  cmd_ben->add_flag("--wall-time,!--no-wall-time", ben.wall_time,
                    "Include the wall_seconds column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_sol->parsed()) return run_solve(sol);
    if (cmd_ver->parsed()) return run_verify(ver);
    if (cmd_ora->parsed()) return run_oracle(ora);
    if (cmd_ben->parsed()) return run_bench(ben);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
