#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "multisis/io.hpp"

namespace fs = std::filesystem;
using multisis::SisInstance;
using multisis::SolutionFile;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("multisis_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the installed tool through the shell, capturing both streams.
// `env_prefix` may carry VAR=value assignments.
CmdResult run_tool(const std::string& args, const std::string& env_prefix = "") {
  static int serial = 0;
  const fs::path out_f = work_dir() / ("out" + std::to_string(serial));
  const fs::path err_f = work_dir() / ("err" + std::to_string(serial));
  ++serial;
  std::string cmd = env_prefix;
  if (!cmd.empty()) cmd += ' ';
  cmd += std::string("\"") + MULTISIS_TOOL_PATH + "\" " + args + " >" +
         out_f.string() + " 2>" + err_f.string();
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  res.exit_code = (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out_f);
  res.err = slurp(err_f);
  return res;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::string path_of(const char* name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("generate writes the documented format, byte-stable per seed") {
  const std::string p1 = path_of("gen_a.txt");
  const std::string p2 = path_of("gen_b.txt");
  const std::string p3 = path_of("gen_c.txt");

  CHECK(run_tool("generate -n 2 -m 6 -q 17 --seed 5 -o " + p1).exit_code == 0);
  CHECK(run_tool("generate -n 2 -m 6 -q 17 --seed 5 -o " + p2).exit_code == 0);
  CHECK(run_tool("generate -n 2 -m 6 -q 17 --seed 6 -o " + p3).exit_code == 0);

  const std::string text = slurp(p1);
  CHECK(text == slurp(p2));
  CHECK(text != slurp(p3));

  // header, LF endings, no carriage returns, terminal newline
  CHECK(text.substr(0, 9) == "SIS 2 6 1");
  CHECK(text.find('\r') == std::string::npos);
  REQUIRE_FALSE(text.empty());
  CHECK(text.back() == '\n');

  // the library reader accepts it and the writer reproduces it byte for byte
  SisInstance inst = multisis::read_instance_file(p1);
  CHECK(inst.n() == 2);
  CHECK(inst.m() == 6);
  CHECK(inst.q() == 17);
  std::ostringstream round;
  multisis::write_instance(round, inst);
  CHECK(round.str() == text);
}

TEST_CASE("generate rejects a composite modulus") {
  const CmdResult r =
      run_tool("generate -n 2 -m 6 -q 91 --seed 1 -o " + path_of("bad.txt"));
  CHECK(r.exit_code == 1);
  CHECK(contains(r.err, "prime"));
}

TEST_CASE("estimate emits machine-readable plans") {
  const CmdResult r =
      run_tool("estimate -n 2 -m 40 -q 97 --nu 8 --count 10 --json");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("feasible").get<bool>());
  CHECK(j.at("n").get<int>() == 2);
  CHECK(j.at("m").get<int>() == 40);
  const int t = j.at("t").get<int>();
  const int d = j.at("d").get<int>();
  CHECK(t >= 1);
  CHECK(d == (1 << t));
  int width_sum = 0;
  for (const auto& w : j.at("block_widths")) width_sum += w.get<int>();
  CHECK(width_sum == 2);
  CHECK(j.at("n_targets").size() == std::size_t(t) + 1);
  CHECK(j.at("capacity").is_string());
  const double ln_cost = j.at("predicted_cost_ln").get<double>();
  const double log2_cost = j.at("predicted_cost_log2").get<double>();
  CHECK(log2_cost == doctest::Approx(ln_cost / std::log(2.0)));

  // the human-readable variant carries the same plan
  const CmdResult plain = run_tool("estimate -n 2 -m 40 -q 97 --nu 8");
  CHECK(plain.exit_code == 0);
  CHECK(contains(plain.out, "t"));
}

TEST_CASE("estimate reports infeasibility as data, exit 2") {
  const CmdResult r = run_tool("estimate -n 2 -m 40 -q 97 --nu 1.5 --json");
  REQUIRE(r.exit_code == 2);
  const auto j = nlohmann::json::parse(r.out);
  CHECK_FALSE(j.at("feasible").get<bool>());
  CHECK(contains(j.at("error").get<std::string>(), "infeasible"));

  const CmdResult plain = run_tool("estimate -n 2 -m 5 -q 97 --nu 4");
  CHECK(plain.exit_code == 2);
}

TEST_CASE("solve writes solutions and stats that verify cleanly") {
  const std::string inst = path_of("pipe_inst.txt");
  const std::string sols = path_of("pipe_sols.txt");
  const std::string stats = path_of("pipe_stats.csv");
  REQUIRE(run_tool("generate -n 2 -m 30 -q 5 --seed 9 -o " + inst).exit_code ==
          0);

  const CmdResult s = run_tool("solve --instance " + inst + " -o " + sols +
                               " --nu 6 --count 5 --seed 3 --stats " + stats);
  REQUIRE(s.exit_code == 0);

  const SolutionFile file = multisis::read_solutions_file(sols);
  CHECK(file.m == 30);
  CHECK(file.rows.size() >= 5);

  const std::string csv = slurp(stats);
  CHECK(csv.substr(0, csv.find('\n')) ==
        "level,rows_in,groups,pairs,zeros,rows_out,max_norm_sq");

  const CmdResult v = run_tool("verify --instance " + inst + " --solutions " +
                               sols + " --nu 6");
  CHECK(v.exit_code == 0);
  CHECK(contains(v.out, "verified " + std::to_string(file.rows.size()) + "/" +
                            std::to_string(file.rows.size()) + " rows"));
}

TEST_CASE("verify pinpoints corrupt and duplicate rows, exit 4") {
  const std::string inst = path_of("ver_inst.txt");
  const std::string sols = path_of("ver_sols.txt");
  REQUIRE(run_tool("generate -n 2 -m 20 -q 7 --seed 4 -o " + inst).exit_code ==
          0);
  REQUIRE(run_tool("solve --instance " + inst + " -o " + sols +
                   " --nu 6 --count 3 --seed 1")
              .exit_code == 0);
  const SolutionFile file = multisis::read_solutions_file(sols);
  REQUIRE(file.rows.size() >= 2);

  auto write_rows = [&](const std::string& path,
                        const std::vector<std::vector<multisis::i64>>& rows) {
    std::ofstream os(path, std::ios::binary);
    os << "SOL " << file.m << " " << rows.size() << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << (i ? " " : "") << row[i];
      os << "\n";
    }
  };

  // a zeroed row fails its own check and names the row
  auto corrupt = file.rows;
  corrupt[0].assign(std::size_t(file.m), 0);
  const std::string bad = path_of("ver_bad.txt");
  write_rows(bad, corrupt);
  const CmdResult rb =
      run_tool("verify --instance " + inst + " --solutions " + bad + " --nu 6");
  CHECK(rb.exit_code == 4);
  CHECK(contains(rb.out, "row 0: FAIL"));
  CHECK(contains(rb.out, "zero"));

  // an exact repeat of row 0 is flagged as a duplicate of it
  auto dup = file.rows;
  dup.push_back(dup[0]);
  const std::string dup_path = path_of("ver_dup.txt");
  write_rows(dup_path, dup);
  const CmdResult rd = run_tool("verify --instance " + inst + " --solutions " +
                                dup_path + " --nu 6");
  CHECK(rd.exit_code == 4);
  CHECK(contains(rd.out, "duplicate of row 0"));
}

TEST_CASE("an unreachable count exits 3 but keeps the partial results") {
  const std::string inst = path_of("starve_inst.txt");
  const std::string sols = path_of("starve_sols.txt");
  REQUIRE(run_tool("generate -n 2 -m 30 -q 5 --seed 2 -o " + inst).exit_code ==
          0);
  const CmdResult s = run_tool("solve --instance " + inst + " -o " + sols +
                               " --nu 6 --count 1000000 --seed 1");
  CHECK(s.exit_code == 3);
  CHECK(contains(s.err, "1000000"));

  const SolutionFile partial = multisis::read_solutions_file(sols);
  CHECK(partial.rows.size() >= 1);
  CHECK(partial.rows.size() < 1000000);
  const CmdResult v = run_tool("verify --instance " + inst + " --solutions " +
                               sols + " --nu 6");
  CHECK(v.exit_code == 0);
}

TEST_CASE("oracle output and the budget override") {
  const std::string inst = path_of("ora_inst.txt");
  REQUIRE(run_tool("generate -n 2 -m 10 -q 5 --seed 8 -o " + inst).exit_code ==
          0);

  const CmdResult ok = run_tool("oracle --instance " + inst +
                                " --mode pm1 --d 2");
  REQUIRE(ok.exit_code == 0);
  CHECK(contains(ok.out, "mode pm1"));
  CHECK(contains(ok.out, "enumerated 100"));

  // the environment overrides the flag, even a generous one
  const CmdResult cut =
      run_tool("oracle --instance " + inst + " --mode pm1 --d 2 --budget 1000000",
               "MULTISIS_BUDGET=10");
  CHECK(cut.exit_code == 1);
  CHECK(contains(cut.err, "from MULTISIS_BUDGET"));
  CHECK(contains(cut.err, "100"));
  CHECK(contains(cut.err, "budget is 10"));

  // ball mode round-trips its solutions through a file
  const std::string found = path_of("ora_out.txt");
  const CmdResult ball = run_tool("oracle --instance " + inst +
                                  " --mode ball --nu 2 --out " + found);
  REQUIRE(ball.exit_code == 0);
  const SolutionFile file = multisis::read_solutions_file(found);
  CHECK(file.m == 10);
  const CmdResult v = run_tool("verify --instance " + inst + " --solutions " +
                               found + " --nu 2");
  CHECK(v.exit_code == 0);
}

TEST_CASE("bench prints a deterministic grid") {
  const std::string args =
      "bench --point 2,20,5,6,5 --point 2,24,7,6,5 --seed 11 --no-wall-time";
  const CmdResult a = run_tool(args);
  REQUIRE(a.exit_code == 0);
  const CmdResult b = run_tool(args);
  CHECK(a.out == b.out);
  CHECK(a.out.substr(0, a.out.find('\n')) ==
        "n,m,q,nu,count,t,k,seeds,rows_processed,solutions,"
        "predicted_ln_cost,measured_ln_work");
  // one header plus one row per point
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 3);

  // an infeasible point aborts the sweep with exit 2
  const CmdResult bad = run_tool("bench --point 2,20,5,1.5,5");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("missing and malformed inputs exit 1 with diagnostics") {
  const CmdResult missing = run_tool("solve --instance " + path_of("nope.txt") +
                                     " -o " + path_of("x.txt") + " --nu 6");
  CHECK(missing.exit_code == 1);

  const std::string mal = path_of("malformed.txt");
  {
    std::ofstream os(mal, std::ios::binary);
    os << "SIS 2 3 5\n1 2\n3 9\n0 1\n";  // 9 is out of range for q = 5
  }
  const CmdResult r = run_tool("verify --instance " + mal + " --solutions " +
                               mal + " --nu 2");
  CHECK(r.exit_code == 1);
  CHECK(contains(r.err, "line 3"));
  CHECK(contains(r.err, "column 3"));

  const CmdResult nosub = run_tool("");
  CHECK(nosub.exit_code == 1);
  const CmdResult badflag = run_tool("generate --frobnicate");
  CHECK(badflag.exit_code == 1);
}
