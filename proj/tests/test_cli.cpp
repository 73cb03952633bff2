// End-to-end checks of the command line driver: exit codes, stream routing,
// and the CSV shapes each subcommand emits. The binary path and the sample
// config directory are injected by the build as CLI_PATH and CONFIG_DIR.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CommandResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string stem = "/tmp/screening_cli_" + std::to_string(counter++);
  const std::string out_path = stem + ".out";
  const std::string err_path = stem + ".err";
  const std::string cmd =
      std::string(CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int raw = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string config(const char* name) { return std::string(CONFIG_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) fields.push_back(cell);
  return fields;
}

const std::string kBenchmark =
    "s_low = 1.0\n"
    "s_high = 2.0\n"
    "p = 0.6\n"
    "beta = 0.4\n"
    "delta = 0.5\n"
    "d = 0.5\n"
    "n_workers = 4\n";

}  // namespace

TEST_CASE("verify maps the verdict to the exit status") {
  const std::string base = "verify --config " + config("p0.cfg");

  SUBCASE("the full workforce at the indifference wage passes") {
    const CommandResult r = run_cli(base + " --set 0,1,2,3 --wage 1.1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "verdict: PASS"));
    CHECK(contains(r.out, "firm_indifference"));
    CHECK(contains(r.out, "screener_ic[3]"));
  }

  SUBCASE("a three-screener profile fails on the outsider's incentive") {
    const CommandResult r = run_cli(base + " --set 0,1,2 --wage 1.0349333333");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.out, "verdict: FAIL"));
    CHECK(contains(r.out, "pooler_ic[3]"));
  }

  SUBCASE("the empty profile passes with no-screening diagnostics") {
    const CommandResult r = run_cli(base);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "verdict: PASS"));
    CHECK(contains(r.out, "no_screen:"));
  }
}

TEST_CASE("verify routes alternating-offer and penalty configurations") {
  SUBCASE("alternating offers accept the full set at its bill") {
    const CommandResult r =
        run_cli("verify --config " + config("p0_alt.cfg") + " --set 0,1,2,3 --wage 0.9");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "verdict: PASS"));
  }

  SUBCASE("penalties leave the full-set equilibrium intact") {
    const CommandResult r =
        run_cli("verify --config " + config("p0_disc.cfg") + " --set 0,1,2,3 --wage 1.1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "verdict: PASS"));
  }

  SUBCASE("proposal costs rescue the segregated three-screener profile") {
    const CommandResult r =
        run_cli("verify --config " + config("p0_disc.cfg") + " --set 0,1,2 --wage 1.0349333333");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "verdict: PASS"));
  }
}

TEST_CASE("solve prints the equilibrium menu with the randomized construction") {
  const CommandResult r = run_cli("solve --config " + config("p0.cfg"));
  CHECK(r.exit_code == 0);

  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "size,per_worker_wage,sigma");
  CHECK(lines[1] == "0,0,0");
  CHECK(lines[2] == "4,1.1,0");
  CHECK(lines[3] == "4,1.5,0.666666666667");
  CHECK(contains(r.err, "pure candidates verified: 2 (plus the randomized-rejection construction)"));

  SUBCASE("--out redirects the table to a file") {
    const std::string out_path = "/tmp/screening_solve.csv";
    const CommandResult f = run_cli("solve --config " + config("p0.cfg") + " --out " + out_path);
    CHECK(f.exit_code == 0);
    CHECK(f.out.empty());
    CHECK(slurp(out_path) == r.out);
    std::remove(out_path.c_str());
  }
}

TEST_CASE("solve with --require-equilibrium fails when screening collapses") {
  const std::string collapsed = write_temp("cli_collapse.cfg", kBenchmark +
                                                                   "rho = 0.9\n"
                                                                   "partition_p = 3\n"
                                                                   "q_reluctant = 0.8\n");

  const CommandResult bad = run_cli("solve --config " + collapsed + " --require-equilibrium");
  CHECK(bad.exit_code == 1);

  const CommandResult good =
      run_cli("solve --config " + config("p0.cfg") + " --require-equilibrium");
  CHECK(good.exit_code == 0);
}

TEST_CASE("sweep traces screening collapse along a sharing sweep") {
  const CommandResult r = run_cli("sweep --config " + config("p0_pool1.cfg") +
                                  " --param rho --from 0.30 --to 0.45 --steps 16");
  CHECK(r.exit_code == 0);

  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 17);
  CHECK(lines[0] ==
        "param_value,n_threshold,eq_size,per_worker_wage,pooler_observability,"
        "screening_collapsed");

  // The collapse indicator flips exactly once from surviving to collapsed.
  int flips = 0;
  std::string prev;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_fields(lines[i]);
    REQUIRE(fields.size() == 6);
    const std::string& collapsed = fields[5];
    REQUIRE((collapsed == "0" || collapsed == "1"));
    if (i == 1) {
      CHECK(fields[0].substr(0, 3) == "0.3");
      CHECK(collapsed == "0");
      CHECK(fields[2] == "3");
    }
    if (i + 1 == lines.size()) {
      CHECK(fields[0] == "0.45");
      CHECK(collapsed == "1");
      CHECK(fields[2] == "0");
    }
    if (!prev.empty() && collapsed != prev) ++flips;
    prev = collapsed;
  }
  CHECK(flips == 1);
}

TEST_CASE("sweep rejects unsupported parameters") {
  SUBCASE("unknown parameter name") {
    const CommandResult r = run_cli("sweep --config " + config("p0.cfg") +
                                    " --param gamma --from 0 --to 1 --steps 2");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "error:"));
  }

  SUBCASE("penalty sweep without a penalty block") {
    const CommandResult r = run_cli("sweep --config " + config("p0.cfg") +
                                    " --param ell --from 0 --to 1 --steps 2");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "penalty block"));
  }
}

TEST_CASE("simulate writes deterministic reports") {
  const std::string args = "simulate --config " + config("p0.cfg") +
                           " --set 0,1,2,3 --wage 1.1 --trials 200 --seed 7";
  const std::string rep1 = "/tmp/screening_rep1.csv";
  const std::string rep2 = "/tmp/screening_rep2.csv";
  const std::string epi1 = "/tmp/screening_epi1.csv";
  const std::string epi2 = "/tmp/screening_epi2.csv";

  const CommandResult a = run_cli(args + " --out " + rep1 + " --episodes " + epi1);
  const CommandResult b = run_cli(args + " --out " + rep2 + " --episodes " + epi2);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);

  const std::string report = slurp(rep1);
  CHECK(report == slurp(rep2));
  CHECK(report.substr(0, 31) == "agent,count,mean,se,analytic,z\n");

  const std::string episodes = slurp(epi1);
  CHECK(episodes == slurp(epi2));
  CHECK(episodes.substr(0, 17) == "trial,firm_high,a");
  CHECK(split_lines(episodes).size() == 201);

  CHECK(contains(a.err, "trials: 200"));
  CHECK(contains(a.err, "worker_0:"));
  CHECK(contains(a.err, "single_crossing_violations: 0"));
  CHECK_FALSE(contains(a.err, "warning:"));

  const CommandResult c = run_cli("simulate --config " + config("p0.cfg") +
                                  " --set 0,1,2,3 --wage 1.1 --trials 200 --seed 8 --out " + rep2);
  CHECK(c.exit_code == 0);
  CHECK(slurp(rep2) != report);

  std::remove(rep1.c_str());
  std::remove(rep2.c_str());
  std::remove(epi1.c_str());
  std::remove(epi2.c_str());
}

TEST_CASE("simulate flags unverified profiles") {
  const std::string args = "simulate --config " + config("p0.cfg") +
                           " --set 0,1,2 --wage 1.0349333333 --trials 50 --seed 3";

  const CommandResult soft = run_cli(args);
  CHECK(soft.exit_code == 0);
  CHECK(contains(soft.err, "warning: UnverifiedProfile"));

  const CommandResult hard = run_cli(args + " --require-equilibrium");
  CHECK(hard.exit_code == 1);
  CHECK(contains(hard.err, "failed verification"));
}

TEST_CASE("simulate argument errors exit with status two") {
  SUBCASE("missing --seed") {
    const CommandResult r = run_cli("simulate --config " + config("p0.cfg") + " --trials 10");
    CHECK(r.exit_code == 2);
  }

  SUBCASE("malformed --force-offer") {
    const CommandResult r = run_cli("simulate --config " + config("p0.cfg") +
                                    " --trials 10 --seed 1 --force-offer 3x1.0");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "id:wage"));
  }
}

TEST_CASE("checkprops runs the four property suites") {
  const CommandResult r =
      run_cli("checkprops --config " + config("p0.cfg") + " --seed 11 --draws 25");
  CHECK(r.exit_code == 0);

  const std::vector<std::string> lines = split_lines(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(contains(lines[0], "PASS observation_submodularity"));
  CHECK(contains(lines[1], "PASS acceptance_supermodularity"));
  CHECK(contains(lines[2], "PASS uniform_wage_indifference"));
  CHECK(contains(lines[3], "PASS wage_observability_monotonicity"));
  for (const std::string& line : lines) CHECK(contains(line, "violations=0"));
}

TEST_CASE("usage and configuration errors exit with status two") {
  SUBCASE("no subcommand") {
    const CommandResult r = run_cli("");
    CHECK(r.exit_code == 2);
  }

  SUBCASE("unknown subcommand") {
    const CommandResult r = run_cli("frobnicate");
    CHECK(r.exit_code == 2);
  }

  SUBCASE("missing --config") {
    const CommandResult r = run_cli("verify");
    CHECK(r.exit_code == 2);
  }

  SUBCASE("config with an unknown key") {
    const std::string path = write_temp("cli_unknown.cfg", kBenchmark + "rho = 0.2\nmystery = 1\n");
    const CommandResult r = run_cli("verify --config " + path);
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "error:"));
    CHECK(contains(r.err, "mystery"));
  }

  SUBCASE("penalty block with alternating offers") {
    const std::string path = write_temp("cli_alt_disc.cfg", kBenchmark +
                                                                "rho = 0.2\n"
                                                                "game = alternating\n"
                                                                "y_set = 3\n"
                                                                "ell = 1.0\n"
                                                                "alpha = 0.5\n"
                                                                "c = 0.05\n"
                                                                "mode = perception\n");
    const CommandResult r = run_cli("verify --config " + path);
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "penalty blocks need game = simple"));
  }
}
