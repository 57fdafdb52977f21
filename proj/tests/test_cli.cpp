// End-to-end CLI tests: drive the installed binary through a shell and
// check exit codes, JSON reports, CSV artifacts, and config round-trips.
// The binary path arrives via the PERCLAB_BIN environment variable (set by
// the test harness; export it manually for standalone runs).
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CmdResult {
  int code = -1;
  std::string output;  // stdout and stderr, interleaved
};

CmdResult run_cmd(const std::string& shell_command) {
  FILE* pipe = popen((shell_command + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  CmdResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = std::move(out);
  return r;
}

std::string bin() {
  const char* b = std::getenv("PERCLAB_BIN");
  REQUIRE_MESSAGE(b != nullptr,
                  "PERCLAB_BIN must point at the CLI binary");
  return b;
}

std::string fresh_dir(const std::string& name) {
  const std::string dir = "/tmp/perclab_cli/" + name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CsvRow {
  long long trial = 0;
  double step = 0, time = 0, total = 0, excit = 0, inhib = 0, newly = 0;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line ==
          "trial,step,time,active_total,active_excit,active_inhib,"
          "newly_active");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string f;
    std::vector<double> v;
    while (std::getline(ls, f, ',')) v.push_back(std::stod(f));
    REQUIRE(v.size() == 7);
    rows.push_back({static_cast<long long>(v[0]), v[1], v[2], v[3], v[4],
                    v[5], v[6]});
  }
  return rows;
}

const std::string kSimFlags =
    " --n 400 --p 0.02 --k 2 --tau 0.1 --gamma 2 --a0 20";

}  // namespace

TEST_CASE("cli: theory report matches the closed forms") {
  const CmdResult r = run_cmd(
      bin() + std::string(" theory --n 1e6 --p 1e-4 --k 2 --tau 0 --gamma 1"
                          " --a0 100"));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.output);
  CHECK(j["a_c"].get<double>() == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(j["lambda"].get<double>() == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(j["beta"].get<double>() == 1.0);
  CHECK(j["predicted_rounds"].get<double>() ==
        doctest::Approx(2.732020845644617).epsilon(1e-12));
  CHECK(j["regime"] == "PERCOLATES");
  REQUIRE(j["traj_prefix"].size() > 0);
  CHECK(j["traj_prefix"][0].get<double>() == 100.0);
}

TEST_CASE("cli: missing required flags fail fast with exit 2") {
  const CmdResult r =
      run_cmd(bin() + std::string(" theory --n 1000 --a0 10"));
  CHECK(r.code == 2);
  CHECK(r.output.find("--p") != std::string::npos);

  // sweep may omit the swept parameter but no other required one.
  const CmdResult ok = run_cmd(
      bin() + std::string(" sweep --param a0 --values 10,20 --n 400"
                          " --p 0.05 --trials 1"));
  CHECK(ok.code == 0);
  const CmdResult bad = run_cmd(
      bin() + std::string(" sweep --param a0 --values 10,20 --n 400"
                          " --trials 1"));
  CHECK(bad.code == 2);
  CHECK(bad.output.find("--p") != std::string::npos);
}

TEST_CASE("cli: invalid model values exit 2 with the violation named") {
  const CmdResult r =
      run_cmd(bin() + std::string(" theory --n 100 --p 1.5 --a0 10"));
  CHECK(r.code == 2);
  CHECK(r.output.find("InvalidProbability") != std::string::npos);
}

TEST_CASE("cli: sim artifacts are byte-identical across reruns") {
  const std::string dir = fresh_dir("determinism");
  const std::string base = bin() + std::string(" sim") + kSimFlags +
                           " --trials 3 --seed 7 --engine async";
  const CmdResult r1 = run_cmd(base + " --out-csv " + dir + "/a.csv" +
                               " --out-json " + dir + "/a.json");
  const CmdResult r2 = run_cmd(base + " --out-csv " + dir + "/b.csv" +
                               " --out-json " + dir + "/b.json");
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(read_file(dir + "/a.csv") == read_file(dir + "/b.csv"));
  CHECK(read_file(dir + "/a.json") == read_file(dir + "/b.json"));
  CHECK(parse_csv(read_file(dir + "/a.csv")).size() > 3);
}

TEST_CASE("cli: emitted config reproduces the run and flags override it") {
  const std::string dir = fresh_dir("config");
  const CmdResult r1 = run_cmd(bin() + std::string(" sim") + kSimFlags +
                               " --trials 2 --seed 7 --emit-config " + dir +
                               "/cfg.json --out-csv " + dir + "/a.csv");
  REQUIRE(r1.code == 0);

  const CmdResult r2 = run_cmd(bin() + std::string(" sim --config ") + dir +
                               "/cfg.json --out-csv " + dir + "/b.csv");
  REQUIRE(r2.code == 0);
  CHECK(read_file(dir + "/a.csv") == read_file(dir + "/b.csv"));

  // A flag on the command line beats the config value; the effective
  // configuration written back shows the override and the inherited rest.
  const CmdResult r3 = run_cmd(bin() + std::string(" sim --config ") + dir +
                               "/cfg.json --tau 0.3 --emit-config " + dir +
                               "/cfg2.json --out-csv " + dir + "/c.csv");
  REQUIRE(r3.code == 0);
  const json cfg2 = json::parse(read_file(dir + "/cfg2.json"));
  CHECK(cfg2["tau"].get<double>() == 0.3);
  CHECK(cfg2["p"].get<double>() == 0.02);
  CHECK(cfg2["n"].get<double>() == 400.0);
  CHECK(cfg2["seed"].get<std::uint64_t>() == 7);
  CHECK(read_file(dir + "/c.csv") != read_file(dir + "/a.csv"));
}

TEST_CASE("cli: PERC_LAB_SEED overrides --seed") {
  const std::string dir = fresh_dir("envseed");
  const std::string base = bin() + std::string(" sim") + kSimFlags +
                           " --trials 2";
  const CmdResult env_run = run_cmd("PERC_LAB_SEED=99 " + base +
                                    " --seed 7 --out-csv " + dir + "/env.csv");
  const CmdResult flag99 =
      run_cmd(base + " --seed 99 --out-csv " + dir + "/f99.csv");
  const CmdResult flag7 =
      run_cmd(base + " --seed 7 --out-csv " + dir + "/f7.csv");
  REQUIRE(env_run.code == 0);
  REQUIRE(flag99.code == 0);
  REQUIRE(flag7.code == 0);
  CHECK(read_file(dir + "/env.csv") == read_file(dir + "/f99.csv"));
  CHECK(read_file(dir + "/env.csv") != read_file(dir + "/f7.csv"));

  const CmdResult garbage = run_cmd("PERC_LAB_SEED=abc " + base + " --seed 7");
  CHECK(garbage.code == 2);
}

TEST_CASE("cli: edgeless graph yields one frozen row per trial") {
  const std::string dir = fresh_dir("edgeless");
  const CmdResult r = run_cmd(bin() +
                              std::string(" sim --n 50 --p 0 --a0 5"
                                          " --trials 2 --out-csv ") +
                              dir + "/t.csv");
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(read_file(dir + "/t.csv"));
  REQUIRE(rows.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].trial == static_cast<long long>(i));
    CHECK(rows[i].step == 0);
    CHECK(rows[i].total == 5);
    CHECK(rows[i].newly == 5);
  }
}

TEST_CASE("cli: truncation surfaces as exit code 4") {
  const CmdResult r = run_cmd(bin() + std::string(" sim") + kSimFlags +
                              " --trials 1 --round-cap 1");
  CHECK(r.code == 4);
  const json j = json::parse(r.output);
  CHECK(j["truncated_trials"].get<long long>() == 1);
}

TEST_CASE("cli: unwritable output path fails before any simulation") {
  const CmdResult r = run_cmd(bin() +
                              std::string(" sim --n 1000000 --p 1e-4 --a0 300"
                                          " --trials 50 --out-csv"
                                          " /dev/null/x.csv"));
  CHECK(r.code == 2);
}

TEST_CASE("cli: unit-delay async trace matches the sync rounds") {
  const std::string dir = fresh_dir("unitdelay");
  const std::string flags =
      " --n 300 --p 0.05 --k 2 --tau 0.2 --gamma 2 --a0 10 --trials 1"
      " --seed 5";
  const CmdResult s = run_cmd(bin() + std::string(" sim") + flags +
                              " --engine sync --out-csv " + dir + "/sync.csv");
  const CmdResult a = run_cmd(bin() + std::string(" sim") + flags +
                              " --engine async --delay unit --out-csv " + dir +
                              "/async.csv");
  REQUIRE(s.code == 0);
  REQUIRE(a.code == 0);
  const auto sync_rows = parse_csv(read_file(dir + "/sync.csv"));
  const auto async_rows = parse_csv(read_file(dir + "/async.csv"));
  REQUIRE(!sync_rows.empty());
  REQUIRE(!async_rows.empty());
  for (const CsvRow& row : async_rows)  // unit delays tick on the integers
    CHECK(row.time == std::floor(row.time));
  for (const CsvRow& srow : sync_rows) {
    double active_by_t = 0;
    for (const CsvRow& arow : async_rows)
      if (arow.time <= srow.time) active_by_t = std::max(active_by_t,
                                                         arow.total);
    CHECK(active_by_t == srow.total);
  }
  CHECK(async_rows.back().total == sync_rows.back().total);
}

TEST_CASE("cli: sweep emits one entry per grid value") {
  const CmdResult r = run_cmd(
      bin() + std::string(" sweep --param tau --values 0.1,0.6 --n 400"
                          " --p 0.05 --a0 20 --trials 2 --seed 3"));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.output);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["params"]["tau"].get<double>() == 0.1);
  CHECK(j[1]["params"]["tau"].get<double>() == 0.6);
  CHECK(j[0]["ok"].get<bool>());
  CHECK(j[1]["ok"].get<bool>());
}

TEST_CASE("cli: validate reports per-round concentration") {
  const CmdResult r = run_cmd(
      bin() + std::string(" validate --n 10000 --p 7.0710678e-4 --a0 400"
                          " --band 1.0 --delta 0.2 --trials 2"));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.output);
  CHECK_FALSE(j["out_of_regime"].get<bool>());
  CHECK(j["pass_fraction"].get<double>() == 1.0);
  CHECK(j["per_round"].size() > 0);
}

TEST_CASE("cli: chaos scan finds an inverted plateau pair") {
  const CmdResult r = run_cmd(
      bin() + std::string(" chaos --n 100000 --p 3.16e-4 --k 2 --tau 0.5"
                          " --gamma 3"));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.output);
  CHECK(j["a_c"].get<double>() == doctest::Approx(200.288).epsilon(1e-3));
  CHECK(j["plateau_table"].size() > 1);
  CHECK(j["c1"].get<double>() < j["c2"].get<double>());

  // Scanning outside the stalling regime is refused, not fudged.
  const CmdResult wrong = run_cmd(
      bin() + std::string(" chaos --n 100000 --p 3.16e-4 --k 2 --tau 0.2"
                          " --gamma 3"));
  CHECK(wrong.code == 3);
  CHECK(wrong.output.find("WrongRegime") != std::string::npos);
}
