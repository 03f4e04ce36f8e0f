#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("WL1_CLI");
  REQUIRE(env != nullptr);
  return env;
}

int run_cli(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("wl1-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t data_rows(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::size_t rows = 0;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("version flag exits cleanly") {
  REQUIRE(run_cli("--version") == 0);
}

TEST_CASE("missing required flags are a usage error") {
  auto dir = scratch("usage");
  REQUIRE(run_cli("--out " + dir.string() + " recover --n 20") == 2);
  REQUIRE(run_cli("--out " + dir.string() + " nosuchcommand") == 2);
}

TEST_CASE("recover runs are deterministic and exit by outcome") {
  auto a = scratch("recover-a");
  auto b = scratch("recover-b");
  std::string args =
      " recover --n 24 --m 16 --n1 12 --p1 0.25 --p2 0.08 --w2 2 --seed 3";
  int ra = run_cli("--out " + a.string() + args);
  int rb = run_cli("--out " + b.string() + args);
  REQUIRE((ra == 0 || ra == 1));
  REQUIRE(ra == rb);
  REQUIRE(slurp(a / "recover.csv") == slurp(b / "recover.csv"));
  REQUIRE(slurp(a / "diagnostics.json") == slurp(b / "diagnostics.json"));
  std::string manifest = slurp(a / "manifest.json");
  REQUIRE(manifest.find("\"schema\"") != std::string::npos);
  REQUIRE(manifest.find("wl1-manifest-v1") != std::string::npos);
  std::string head = slurp(a / "recover.csv").substr(0, 32);
  REQUIRE(head.rfind("index,x_true,x_hat,abs_error", 0) == 0);
}

TEST_CASE("simulate sweep: reruns, manifests and threads agree byte for byte") {
  auto a = scratch("sim-a");
  auto b = scratch("sim-b");
  auto c = scratch("sim-c");
  auto d = scratch("sim-d");
  std::string args =
      " simulate --n 30 --m 18 --n1 15 --p2 0.05 --p1-list 0.1,0.3 "
      "--w2-list 1,2 --trials 4 --seed 11";
  REQUIRE(run_cli("--out " + a.string() + args) == 0);
  REQUIRE(run_cli("--out " + b.string() + args) == 0);
  std::string curves = slurp(a / "curves.csv");
  REQUIRE(curves == slurp(b / "curves.csv"));
  REQUIRE(curves.rfind("P1,W2,trials,successes,rate,ci_lo,ci_hi", 0) == 0);
  REQUIRE(data_rows(curves) == 4);  // 2 P1 x 2 W2

  // re-run from the manifest alone
  REQUIRE(run_cli("--out " + c.string() + " simulate --from-manifest " +
                  (a / "manifest.json").string()) == 0);
  REQUIRE(curves == slurp(c / "curves.csv"));
  // different worker count, same bytes
  REQUIRE(run_cli("--out " + d.string() + " --threads 3 simulate --from-manifest " +
                  (a / "manifest.json").string()) == 0);
  REQUIRE(curves == slurp(d / "curves.csv"));
}

TEST_CASE("simulate without a P1 sweep is rejected") {
  auto dir = scratch("sim-empty");
  REQUIRE(run_cli("--out " + dir.string() +
                  " simulate --n 30 --m 18 --n1 15 --trials 2") == 2);
}

TEST_CASE("manifest command mismatch is rejected") {
  auto a = scratch("mismatch-a");
  auto b = scratch("mismatch-b");
  REQUIRE(run_cli("--out " + a.string() +
                  " recover --n 24 --m 16 --n1 12 --p1 0.25 --p2 0.08 --seed 3") <= 1);
  REQUIRE(run_cli("--out " + b.string() + " simulate --from-manifest " +
                  (a / "manifest.json").string()) == 2);
}

TEST_CASE("threshold tables: single value and 21-point range") {
  auto a = scratch("thr-a");
  REQUIRE(run_cli("--out " + a.string() +
                  " threshold --delta 0.75 --p2 0.1 --gamma1 0.5 --w2-list 2 "
                  "--tol 5e-3 --grid-n 60") == 0);
  std::string single = slurp(a / "threshold.csv");
  REQUIRE(single.rfind("W2,P1_threshold", 0) == 0);
  REQUIRE(data_rows(single) == 1);

  auto b = scratch("thr-b");
  REQUIRE(run_cli("--out " + b.string() +
                  " threshold --delta 0.75 --p2 0.1 --gamma1 0.5 --w2-range 1:3:0.1 "
                  "--tol 5e-3 --grid-n 60") == 0);
  std::string table = slurp(b / "threshold.csv");
  REQUIRE(data_rows(table) == 21);
  // thresholds never decrease in W2 for this configuration
  std::istringstream is(table);
  std::string line;
  std::getline(is, line);
  double prev = -1.0;
  while (std::getline(is, line)) {
    double w2, th;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &w2, &th) == 2);
    REQUIRE(th >= prev - 1e-2);
    prev = std::max(prev, th);
  }
  REQUIRE(prev <= 1.0);
}

TEST_CASE("weights subcommand validates the configuration") {
  auto dir = scratch("wgt-bad");
  REQUIRE(run_cli("--out " + dir.string() +
                  " weights --delta 1.5 --p2 0.1 --gamma1 0.5 --w-max 2 "
                  "--tol-w 0.5 --inner-tol 1e-3 --grid-n 40") == 2);
}

TEST_CASE("surface dumps are reproducible") {
  auto a = scratch("srf-a");
  auto b = scratch("srf-b");
  std::string args =
      " surface --delta 0.75 --gamma1 0.5 --p1 0.3 --p2 0.1 --w 2 --grid-n 40";
  REQUIRE(run_cli("--out " + a.string() + args) == 0);
  REQUIRE(run_cli("--out " + b.string() + args) == 0);
  REQUIRE(slurp(a / "surface.csv") == slurp(b / "surface.csv"));
  std::string verdict = slurp(a / "verdict.json");
  REQUIRE(verdict.find("\"recoverable\"") != std::string::npos);
  REQUIRE(slurp(a / "surface.csv").rfind("t1p,t2p,psi_com,psi_int,psi_ext,psi_total", 0) == 0);
}

TEST_CASE("angle tables are reproducible") {
  auto a = scratch("ang-a");
  auto b = scratch("ang-b");
  std::string args =
      " angles --n 30 --n1 15 --p1 0.2 --p2 0.1 --w2 2 --t1-max 3 --t2-max 2";
  REQUIRE(run_cli("--out " + a.string() + args) == 0);
  REQUIRE(run_cli("--out " + b.string() + args) == 0);
  std::string table = slurp(a / "angles.csv");
  REQUIRE(table == slurp(b / "angles.csv"));
  REQUIRE(table.rfind("t1,t2,log_internal,log_external,log_term", 0) == 0);
  REQUIRE(data_rows(table) == 4 * 3);
}
