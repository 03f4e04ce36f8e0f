// release gate: one test per shipping criterion, each printing a PASS/FAIL line
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "wl1/angles.hpp"
#include "wl1/experiments.hpp"
#include "wl1/exponents.hpp"
#include "wl1/lp.hpp"
#include "wl1/model.hpp"
#include "wl1/recovery.hpp"
#include "wl1/rng.hpp"
#include "wl1/special.hpp"

namespace fs = std::filesystem;

namespace {

void announce(int num, const char* name, bool pass) {
  std::printf("[ACCEPTANCE] criterion %d (%s): %s\n", num, name, pass ? "PASS" : "FAIL");
  std::fflush(stdout);
}

double rate_at(const std::vector<wl1::CurvePoint>& pts, double P1, double W2) {
  for (const auto& p : pts)
    if (std::abs(p.P1 - P1) < 1e-12 && std::abs(p.W2 - W2) < 1e-12) return p.rate;
  throw std::runtime_error("curve point missing");
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, wl1::CounterRng& g) {
  Eigen::MatrixXd A(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) A(r, c) = g.normal();
  return A;
}

struct EnumResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
};

// exhaustive minimum over basic feasible solutions of min c'x, Ex = d, x >= 0
EnumResult enumerate_basic_solutions(const Eigen::VectorXd& c, const Eigen::MatrixXd& E,
                                     const Eigen::VectorXd& d) {
  const int m = static_cast<int>(E.rows()), n = static_cast<int>(E.cols());
  EnumResult best;
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Eigen::MatrixXd B(m, m);
    for (int j = 0; j < m; ++j) B.col(j) = E.col(idx[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.isInvertible()) {
      Eigen::VectorXd xb = lu.solve(d);
      if (!(xb.array() < -1e-9).any()) {
        double obj = 0.0;
        for (int j = 0; j < m; ++j) obj += c[idx[j]] * std::max(0.0, xb[j]);
        if (!best.feasible || obj < best.objective) {
          best.feasible = true;
          best.objective = obj;
        }
      }
    }
    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("WL1_CLI");
  if (!cli) return -1;
  std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
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
  fs::path dir = fs::temp_directory_path() / ("wl1-acceptance-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("criterion 1: tuned weights beat uniform weights along the sparsity sweep") {
  wl1::ExperimentPlan plan;
  plan.n = 200;
  plan.m = 100;
  plan.n1 = 100;
  plan.n2 = 100;
  plan.P2 = 0.05;
  plan.p1_list = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};
  plan.w2_list = {1.0, 2.0, 3.0};
  plan.trials = 200;
  plan.seed = 20240501;
  auto pts = wl1::run_plan(plan);

  // look for a run of sweep points where the better of W2 in {2,3} beats
  // W2 = 1 by at least ten percentage points (instances are paired)
  int streak = 0, best_streak = 0;
  for (double p1 : plan.p1_list) {
    double base = rate_at(pts, p1, 1.0);
    double best = std::max(rate_at(pts, p1, 2.0), rate_at(pts, p1, 3.0));
    streak = (best - base >= 0.10) ? streak + 1 : 0;
    best_streak = std::max(best_streak, streak);
  }
  bool pass = best_streak >= 3;
  announce(1, "weighted sweep beats uniform by >= 10 points at >= 3 consecutive P1", pass);
  for (double p1 : plan.p1_list)
    std::printf("    P1 = %.2f: rates %.3f / %.3f / %.3f (W2 = 1/2/3)\n", p1,
                rate_at(pts, p1, 1.0), rate_at(pts, p1, 2.0), rate_at(pts, p1, 3.0));
  REQUIRE(pass);
}

TEST_CASE("criterion 2: threshold ordering in W2 carries over to finite-n crossings") {
  wl1::ExponentGridOptions gopts;
  gopts.grid_n = 120;
  gopts.keep_surface = false;
  double th1 = wl1::threshold_P1(0.75, 0.1, 0.5, 0.5, 1.0, 1e-3, 0.0, gopts);
  double th2 = wl1::threshold_P1(0.75, 0.1, 0.5, 0.5, 2.0, 1e-3, 0.0, gopts);
  double th3 = wl1::threshold_P1(0.75, 0.1, 0.5, 0.5, 3.0, 1e-3, 0.0, gopts);
  bool theory_ok = th2 > th1;

  wl1::ExperimentPlan plan;
  plan.n = 200;
  plan.m = 150;
  plan.n1 = 100;
  plan.n2 = 100;
  plan.P2 = 0.1;
  plan.p1_list = {0.55, 0.66, 0.77, 0.88, 0.99};
  plan.w2_list = {1.0, 2.0, 3.0};
  plan.trials = 200;
  plan.seed = 20240502;
  auto pts = wl1::run_plan(plan);
  double c1 = wl1::crossing_p1(pts, 1.0);
  double c2 = wl1::crossing_p1(pts, 2.0);
  double c3 = wl1::crossing_p1(pts, 3.0);
  // a curve that never falls below one half crosses at +infinity, which keeps
  // the ordering comparable as long as the next curve down does cross
  bool empirical_ok = (c1 < c2) && (c2 < c3);

  bool pass = theory_ok && empirical_ok;
  announce(2, "threshold_P1 ordering matches empirical 50% crossings", pass);
  std::printf("    theory: th(1) = %.4f, th(2) = %.4f, th(3) = %.4f\n", th1, th2, th3);
  std::printf("    empirical crossings: %.4f / %.4f / %.4f\n", c1, c2, c3);
  REQUIRE(pass);
}

TEST_CASE("criterion 3: finite-n angle terms track the asymptotic exponents") {
  const int n = 1000;
  auto model = wl1::SparsityModel::contiguous(n, 500, 0.3, 0.1);
  double worst = 0.0;
  for (double W : {1.0, 2.0}) {
    for (double delta : {0.5, 0.75}) {
      wl1::AsymptoticConfig cfg;
      cfg.delta = delta;
      cfg.gamma1 = 0.5;
      cfg.gamma2 = 0.5;
      cfg.P1 = 0.3;
      cfg.P2 = 0.1;
      cfg.W = W;
      const int k = static_cast<int>(std::lround(n * cfg.nu()));
      // 5x5 grids chosen inside the admissible strip for each delta
      std::vector<double> t1s = delta < 0.6 ? std::vector<double>{0.10, 0.15, 0.21, 0.27, 0.33}
                                            : std::vector<double>{0.16, 0.20, 0.25, 0.29, 0.34};
      std::vector<double> t2s = delta < 0.6 ? std::vector<double>{0.21, 0.27, 0.32, 0.38, 0.44}
                                            : std::vector<double>{0.40, 0.41, 0.42, 0.43, 0.44};
      for (double t1p : t1s) {
        for (double t2p : t2s) {
          wl1::AngleQuery q;
          q.model = model;
          q.W2 = W;
          q.k = k;
          q.t1 = static_cast<int>(std::lround(t1p * n));
          q.t2 = static_cast<int>(std::lround(t2p * n));
          auto pt = wl1::evaluate_point(q.t1 / double(n), q.t2 / double(n), cfg);
          double com_fin = ((q.t1 + q.t2) * wl1::kLn2 +
                            wl1::log_binomial((1.0 - model.P1) * model.n1, q.t1) +
                            wl1::log_binomial((1.0 - model.P2) * model.n2, q.t2)) /
                           n;
          double int_fin = wl1::internal_angle(q) / n;
          double ext_fin = wl1::external_angle(q) / n;
          worst = std::max(worst, std::abs(com_fin - pt.psi_com));
          worst = std::max(worst, std::abs(int_fin - (-pt.psi_int)));
          worst = std::max(worst, std::abs(ext_fin - (-pt.psi_ext)));
        }
      }
    }
  }
  bool pass = worst <= 3e-2;
  announce(3, "n = 1000 term logs match psi decomposition within 3e-2", pass);
  std::printf("    worst per-term deviation: %.3e\n", worst);
  REQUIRE(pass);
}

TEST_CASE("criterion 4: nullspace certificate agrees with exhaustive sign-pattern recovery") {
  int disagreements = 0;
  for (int i = 0; i < 100; ++i) {
    wl1::CounterRng g(wl1::derive_seed(40001, i, 0), 0);
    const int n = 8 + static_cast<int>(g.next_u64() % 5);  // 8..12
    const int m_hi = std::min(10, n - 2);
    const int m = 6 + static_cast<int>(g.next_u64() % (m_hi - 5));  // 6..m_hi
    const int ksize = 1 + static_cast<int>(g.next_u64() % 4);       // 1..4
    const double W2 = 1.0 + static_cast<double>(g.next_u64() % 3);  // 1, 2, 3

    Eigen::MatrixXd A = gaussian_matrix(m, n, g);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int j = n - 1; j > 0; --j)
      std::swap(perm[j], perm[g.next_u64() % (j + 1)]);
    std::vector<int> K(perm.begin(), perm.begin() + ksize);
    std::sort(K.begin(), K.end());
    auto w = wl1::WeightScheme::for_model(wl1::SparsityModel::contiguous(n, n / 2, 0.5, 0.5), W2);

    bool certified = wl1::nullspace_condition(A, K, w);

    bool all_recover = true;
    for (std::uint64_t mask = 0; mask < (1ull << ksize) && all_recover; ++mask) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < ksize; ++j) {
        double amp = 0.2 + std::abs(g.normal());  // bounded away from zero
        x[K[j]] = ((mask >> j) & 1 ? -1.0 : 1.0) * amp;
      }
      auto r = wl1::recover(A, A * x, w, &x);
      all_recover = r.success;
    }
    if (certified != all_recover) ++disagreements;
  }
  bool pass = disagreements == 0;
  announce(4, "100 instances, certificate vs all sign patterns, 0 disagreements", pass);
  std::printf("    disagreements: %d\n", disagreements);
  REQUIRE(pass);
}

TEST_CASE("criterion 5: interior point matches exhaustive vertex search on tiny programs") {
  int bad_objective = 0, bad_gap = 0, not_optimal = 0;
  for (int i = 0; i < 500; ++i) {
    wl1::CounterRng g(wl1::derive_seed(50001, i, 0), 0);
    const int nsig = 3 + static_cast<int>(g.next_u64() % 6);  // 3..8
    const int m_hi = std::min(6, nsig - 1);
    const int m = 2 + static_cast<int>(g.next_u64() % (m_hi - 1));  // 2..m_hi
    const double W2 = 1.0 + 2.0 * g.uniform01();

    Eigen::MatrixXd A = gaussian_matrix(m, nsig, g);
    Eigen::VectorXd x0(nsig);
    for (int j = 0; j < nsig; ++j) x0[j] = g.normal();
    Eigen::VectorXd y = A * x0;
    auto w = wl1::WeightScheme::for_model(
        wl1::SparsityModel::contiguous(nsig, nsig / 2, 0.5, 0.5), W2);

    auto lp = wl1::build_weighted_l1_lp(A, y, w);
    auto sol = wl1::solve(lp);
    auto oracle = enumerate_basic_solutions(lp.c, lp.E, lp.d);
    REQUIRE(oracle.feasible);
    if (sol.status != wl1::LpStatus::Optimal) {
      ++not_optimal;
      continue;
    }
    if (std::abs(sol.objective - oracle.objective) >
        1e-6 * std::max(1.0, std::abs(oracle.objective)))
      ++bad_objective;
    if (sol.duality_gap > 1e-8) ++bad_gap;
  }
  bool pass = bad_objective == 0 && bad_gap == 0 && not_optimal == 0;
  announce(5, "500 tiny split programs match vertex enumeration at 1e-6", pass);
  std::printf("    objective mismatches: %d, gap violations: %d, non-optimal: %d\n",
              bad_objective, bad_gap, not_optimal);
  REQUIRE(pass);
}

TEST_CASE("criterion 6: uniform weights make the class split immaterial") {
  // recovery outputs: same seed, same P1 = P2, different splits => identical bytes
  std::uint64_t seed = 606;
  auto model_a = wl1::SparsityModel::contiguous(60, 20, 0.2, 0.2);
  auto model_b = wl1::SparsityModel::contiguous(60, 40, 0.2, 0.2);
  auto inst_a = wl1::gaussian_instance(model_a, 30, wl1::AmplitudeLaw::Gaussian, seed);
  auto inst_b = wl1::gaussian_instance(model_b, 30, wl1::AmplitudeLaw::Gaussian, seed);
  bool instances_equal = (inst_a.x_true.x.array() == inst_b.x_true.x.array()).all() &&
                         (inst_a.A.array() == inst_b.A.array()).all();
  auto ra = wl1::recover(inst_a, wl1::WeightScheme::for_model(model_a, 1.0));
  auto rb = wl1::recover(inst_b, wl1::WeightScheme::for_model(model_b, 1.0));
  bool recovery_equal = (ra.x_hat.array() == rb.x_hat.array()).all();

  // exponent verdicts and the diagonal threshold: invariant across gamma1
  wl1::ExponentGridOptions gopts;
  gopts.grid_n = 120;
  gopts.keep_surface = false;
  auto diagonal_threshold = [&](double gamma1) {
    double lo = 0.05, hi = 0.45;
    for (int it = 0; it < 14; ++it) {
      double mid = 0.5 * (lo + hi);
      wl1::AsymptoticConfig cfg;
      cfg.delta = 0.5;
      cfg.gamma1 = gamma1;
      cfg.gamma2 = 1.0 - gamma1;
      cfg.P1 = mid;
      cfg.P2 = mid;
      cfg.W = 1.0;
      (wl1::recoverable(cfg, 0.0, gopts).recoverable ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double d_splits[3] = {diagonal_threshold(0.2), diagonal_threshold(0.5),
                        diagonal_threshold(0.8)};
  bool thresholds_equal = std::abs(d_splits[0] - d_splits[1]) <= 2e-3 &&
                          std::abs(d_splits[2] - d_splits[1]) <= 2e-3;

  // searched weight returns to 1 when the classes are statistically identical.
  // P2 is set to the diagonal threshold so the maximized P1 lands back on P2:
  // that is the configuration where "P1 = P2" actually holds at the optimum
  // (for smaller P2 the maximized P1 exceeds P2, the classes are no longer
  // exchangeable, and the true optimum tilts slightly above 1)
  auto best = wl1::optimal_weight(0.5, d_splits[1], 0.5, 0.5);
  bool weight_ok = std::abs(best.W_star - 1.0) <= 1e-2;

  bool pass = instances_equal && recovery_equal && thresholds_equal && weight_ok;
  announce(6, "W2 = 1 pipeline is split-invariant and optimal_weight snaps to 1", pass);
  std::printf("    diagonal thresholds: %.5f / %.5f / %.5f, W_star = %.4f\n", d_splits[0],
              d_splits[1], d_splits[2], best.W_star);
  REQUIRE(pass);
}

TEST_CASE("criterion 7: manifests reproduce byte-identical tables at any worker count") {
  REQUIRE(std::getenv("WL1_CLI") != nullptr);

  auto sim_a = scratch("sim-a");
  auto sim_b = scratch("sim-b");
  bool pass = run_cli("--out " + sim_a.string() +
                      " simulate --n 40 --m 20 --n1 20 --p2 0.05 --p1-list 0.1,0.25 "
                      "--w2-list 1,2 --trials 6 --seed 5") == 0;
  pass = pass && run_cli("--out " + sim_b.string() + " --threads 3 simulate --from-manifest " +
                         (sim_a / "manifest.json").string()) == 0;
  pass = pass && slurp(sim_a / "curves.csv") == slurp(sim_b / "curves.csv");

  auto thr_a = scratch("thr-a");
  auto thr_b = scratch("thr-b");
  pass = pass && run_cli("--out " + thr_a.string() +
                         " threshold --delta 0.6 --p2 0.05 --gamma1 0.5 --w2-list 1.5 "
                         "--tol 5e-3 --grid-n 50") == 0;
  pass = pass && run_cli("--out " + thr_b.string() + " --threads 2 threshold --from-manifest " +
                         (thr_a / "manifest.json").string()) == 0;
  pass = pass && slurp(thr_a / "threshold.csv") == slurp(thr_b / "threshold.csv");

  auto ang_a = scratch("ang-a");
  auto ang_b = scratch("ang-b");
  pass = pass && run_cli("--out " + ang_a.string() +
                         " angles --n 30 --n1 15 --p1 0.2 --p2 0.1 --w2 2 "
                         "--t1-max 3 --t2-max 2") == 0;
  pass = pass && run_cli("--out " + ang_b.string() + " angles --from-manifest " +
                         (ang_a / "manifest.json").string()) == 0;
  pass = pass && slurp(ang_a / "angles.csv") == slurp(ang_b / "angles.csv");

  auto rec_a = scratch("rec-a");
  auto rec_b = scratch("rec-b");
  int rc_a = run_cli("--out " + rec_a.string() +
                     " recover --n 24 --m 16 --n1 12 --p1 0.25 --p2 0.08 --seed 9");
  int rc_b = run_cli("--out " + rec_b.string() + " recover --from-manifest " +
                     (rec_a / "manifest.json").string());
  pass = pass && rc_a <= 1 && rc_a == rc_b &&
         slurp(rec_a / "recover.csv") == slurp(rec_b / "recover.csv");

  announce(7, "manifest re-runs are byte-identical across thread counts", pass);
  REQUIRE(pass);
}
