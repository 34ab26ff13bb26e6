#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string tag = "/tmp/pllhopf_cli_" + std::to_string(counter++);
  const std::string cmd =
      std::string(PLLHOPF_CLI_PATH) + " " + args + " >" + tag + ".out 2>" + tag + ".err";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(tag + ".out");
  r.err = slurp(tag + ".err");
  std::remove((tag + ".out").c_str());
  std::remove((tag + ".err").c_str());
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("cli equilibria prints the closed form and validates K") {
  const RunResult r = run_cli("equilibria --k 1 --branch plus");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("-0.7853981634") != std::string::npos);

  const RunResult r2 = run_cli("equilibria --k 1.05 --branch plus");
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.find("-0.6304758435") != std::string::npos);

  const RunResult bad = run_cli("equilibria --k 0.5");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("K must be >= 1") != std::string::npos);
}

TEST_CASE("cli hopf emits the curve table with the reference points") {
  const std::string args =
      "hopf --k 1.05 --branch minus --mu-min 0.05 --mu-max 0.42 --steps 149 --j-max 1 -o -";
  const RunResult r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"branch_id", "mu", "tau", "omega", "re_dlambda",
                                            "direction", "residual"});
  bool near_a = false, near_b = false;
  for (size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 7);
    const double mu = std::stod(rows[i][1]);
    const double tau = std::stod(rows[i][2]);
    const double res = std::stod(rows[i][6]);
    CHECK(res <= 1e-9);
    const std::string& dir = rows[i][5];
    if (std::hypot(mu - 0.3, tau - 6.34) <= 0.05 && dir == "L2R") near_a = true;
    if (std::hypot(mu - 0.3, tau - 11.0) <= 0.05 && dir == "R2L") near_b = true;
  }
  CHECK(near_a);
  CHECK(near_b);

  // byte determinism
  const RunResult r2 = run_cli(args);
  CHECK(r.out == r2.out);
}

TEST_CASE("cli lyapunov emits the scan table") {
  const RunResult r = run_cli(
      "lyapunov --k 1.05 --branch minus --mu-min 0.2 --mu-max 0.4 --steps 9 --j-max 0 -o -");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"branch_id", "mu", "tau", "omega", "a", "stability",
                                            "inconclusive_flag", "note"});
  for (size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 8);
    CHECK((rows[i][5] == "stable" || rows[i][5] == "unstable"));
    CHECK(rows[i][7].empty());
  }
  // empty scans keep the header
  const RunResult r2 = run_cli(
      "lyapunov --k 1.05 --branch minus --mu-min 0.5 --mu-max 0.6 --steps 4 --j-max 0 -o -");
  REQUIRE(r2.exit_code == 0);
  const auto rows2 = parse_csv(r2.out);
  CHECK(rows2.size() == 1);
}

TEST_CASE("cli simulate validates, reports blowup, and writes trajectories") {
  const RunResult bad = run_cli("simulate --mode reduced --t-end 0");
  CHECK(bad.exit_code == 2);

  // strongly scaled initial data on the returning curve blows up through the cubic
  const RunResult blow = run_cli(
      "simulate --mode reduced --k 1.05 --branch minus --mu 0.3 --tau 11 --y10 1 --y20 1 "
      "--t-end 50 -o /tmp/pllhopf_blow.csv");
  CHECK(blow.exit_code == 0);
  CHECK(blow.out.find("BLOWUP t=") != std::string::npos);
  std::remove("/tmp/pllhopf_blow.csv");

  const RunResult fx = run_cli(
      "simulate --mode fix_truncated --k 1.05 --branch minus --mu 0.3 --tau 6.34 --dt 0.1 "
      "--eps 1e-3 --t-end 20 -o -");
  REQUIRE(fx.exit_code == 0);
  CHECK(fx.err.find("dt adjusted to") != std::string::npos);
  const auto rows = parse_csv(fx.out.substr(0, fx.out.find("amplitude=")));
  CHECK(rows[0] == std::vector<std::string>{"t", "x1", "x2"});
  REQUIRE(rows.size() > 100);
  CHECK(std::stod(rows[1][0]) >= 0.0);

  const RunResult net = run_cli(
      "simulate --mode network --nodes 3 --k 1.05 --branch minus --mu 0.3 --tau 2 --dt 0.1 "
      "--eps 1e-3 --t-end 10 -o -");
  REQUIRE(net.exit_code == 0);
  const auto nrows = parse_csv(net.out.substr(0, net.out.find("amplitude=")));
  CHECK(nrows[0] == std::vector<std::string>{"t", "phi_1", "phi_2", "phi_3", "dphi_1", "dphi_2",
                                             "dphi_3"});

  const RunResult dec = run_cli(
      "simulate --mode network --nodes 3 --k 1.05 --branch minus --mu 0.3 --tau 2 --dt 0.1 "
      "--eps 1e-3 --t-end 10 --decimate 2 -o -");
  REQUIRE(dec.exit_code == 0);
  const auto drows = parse_csv(dec.out.substr(0, dec.out.find("amplitude=")));
  CHECK(drows.size() - 1 == (nrows.size() - 1 + 1) / 2);
}

TEST_CASE("cli dump-config echoes the resolved settings") {
  const RunResult r = run_cli("equilibria --k 1.2 --branch minus --dump-config");
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("subcommand=equilibria") != std::string::npos);
  CHECK(r.err.find("k=1.2") != std::string::npos);
  CHECK(r.err.find("branch=minus") != std::string::npos);
  CHECK(r.err.find("seed=0") != std::string::npos);
}
