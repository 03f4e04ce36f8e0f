#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wl1/exponents.hpp"
#include "wl1/model.hpp"
#include "wl1/parallel.hpp"
#include "wl1/recovery.hpp"
#include "wl1/rng.hpp"

namespace wl1 {

// Monte Carlo sweep: recovery rate vs P1 for a list of weight ratios, with
// the same instances reused across W2 so weight comparisons are paired.
struct ExperimentPlan {
  int n = 200;
  int m = 100;
  int n1 = 100;
  int n2 = 100;
  double P2 = 0.05;
  std::vector<double> p1_list;
  std::vector<double> w2_list;
  int trials = 200;
  std::uint64_t seed = 0;
  double success_tol = 1e-6;
  AmplitudeLaw amplitude = AmplitudeLaw::Gaussian;

  void validate() const {
    if (n <= 0 || m <= 0 || m > n || n1 < 0 || n2 < 0 || n1 + n2 != n)
      throw std::invalid_argument("ExperimentPlan: bad dimensions");
    if (trials < 1) throw std::invalid_argument("ExperimentPlan: trials must be >= 1");
    if (p1_list.empty() || w2_list.empty())
      throw std::invalid_argument("ExperimentPlan: sweep lists must be nonempty");
    for (std::size_t i = 1; i < p1_list.size(); ++i)
      if (p1_list[i] <= p1_list[i - 1])
        throw std::invalid_argument("ExperimentPlan: p1 list must be strictly increasing");
    for (std::size_t i = 1; i < w2_list.size(); ++i)
      if (w2_list[i] <= w2_list[i - 1])
        throw std::invalid_argument("ExperimentPlan: w2 list must be strictly increasing");
    for (double p : p1_list)
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("ExperimentPlan: P1 out of [0,1]");
    if (P2 < 0.0 || P2 > 1.0) throw std::invalid_argument("ExperimentPlan: P2 out of [0,1]");
    for (double w : w2_list)
      if (w <= 0.0) throw std::invalid_argument("ExperimentPlan: W2 must be positive");
  }
};

struct CurvePoint {
  double P1 = 0.0;
  double W2 = 1.0;
  int trials = 0;
  int successes = 0;
  int solver_failures = 0;  // non-Optimal LP statuses, counted as failures
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// 95% Wilson score interval for a binomial proportion
inline std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // Phi^{-1}(0.975)
  double n = trials, p = double(successes) / n, z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // at the boundary counts the exact endpoints are 0 and 1; rounding must not
  // pull them inward
  double lo = (successes == 0) ? 0.0 : std::max(0.0, center - half);
  double hi = (successes == trials) ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

// One experiment cell: (P1 index, trial index) -> outcomes for every W2.
// The instance seed depends only on (plan seed, P1 index, trial), never on
// W2, which is what makes the weight comparison paired.
inline std::vector<CurvePoint> run_plan(const ExperimentPlan& plan, int threads = 0) {
  plan.validate();
  const std::size_t np = plan.p1_list.size(), nw = plan.w2_list.size();
  const std::size_t cells = np * static_cast<std::size_t>(plan.trials);
  // outcome per (cell, w2): 0 fail, 1 success; second flag marks solver failure
  std::vector<unsigned char> success(cells * nw, 0), solver_fail(cells * nw, 0);

  RecoveryOptions ropts;
  ropts.success_tol = plan.success_tol;

  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t ip = cell / plan.trials;
    const std::size_t trial = cell % plan.trials;
    SparsityModel model = SparsityModel::contiguous(plan.n, plan.n1, plan.p1_list[ip], plan.P2);
    const std::uint64_t iseed = derive_seed(plan.seed, ip, trial);
    ProblemInstance inst = gaussian_instance(model, plan.m, plan.amplitude, iseed);
    for (std::size_t jw = 0; jw < nw; ++jw) {
      WeightScheme w = WeightScheme::for_model(model, plan.w2_list[jw]);
      RecoveryResult r = recover(inst, w, ropts);
      success[cell * nw + jw] = r.success ? 1 : 0;
      solver_fail[cell * nw + jw] = (r.status != LpStatus::Optimal) ? 1 : 0;
    }
  }, threads);

  std::vector<CurvePoint> out;
  out.reserve(np * nw);
  for (std::size_t ip = 0; ip < np; ++ip) {
    for (std::size_t jw = 0; jw < nw; ++jw) {
      CurvePoint cp;
      cp.P1 = plan.p1_list[ip];
      cp.W2 = plan.w2_list[jw];
      cp.trials = plan.trials;
      for (int t = 0; t < plan.trials; ++t) {
        std::size_t cell = ip * plan.trials + t;
        cp.successes += success[cell * nw + jw];
        cp.solver_failures += solver_fail[cell * nw + jw];
      }
      cp.rate = double(cp.successes) / cp.trials;
      auto [lo, hi] = wilson_interval(cp.successes, cp.trials);
      cp.ci_lo = lo;
      cp.ci_hi = hi;
      out.push_back(cp);
    }
  }
  return out;
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& pts) {
  os << "P1,W2,trials,successes,rate,ci_lo,ci_hi\n";
  char buf[256];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%d,%d,%.10g,%.10g,%.10g\n", p.P1, p.W2,
                  p.trials, p.successes, p.rate, p.ci_lo, p.ci_hi);
    os << buf;
  }
}

// P1 at which the recovery curve crosses 50%, by linear interpolation
// between adjacent sweep points; +inf when the curve stays above 50%
// throughout, -inf when it starts below, NaN when the sweep is degenerate.
inline double crossing_p1(const std::vector<CurvePoint>& pts, double W2) {
  std::vector<const CurvePoint*> row;
  for (const auto& p : pts)
    if (p.W2 == W2) row.push_back(&p);
  std::sort(row.begin(), row.end(),
            [](const CurvePoint* a, const CurvePoint* b) { return a->P1 < b->P1; });
  if (row.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  if (row.front()->rate < 0.5) return -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < row.size(); ++i) {
    double r0 = row[i - 1]->rate, r1 = row[i]->rate;
    if (r0 >= 0.5 && r1 < 0.5) {
      double f = (r0 - 0.5) / (r0 - r1);
      return row[i - 1]->P1 + f * (row[i]->P1 - row[i - 1]->P1);
    }
  }
  return std::numeric_limits<double>::infinity();
}

struct TheoryComparisonRow {
  double W2 = 1.0;
  double empirical_crossing = 0.0;   // +/-inf and NaN per crossing_p1
  double theoretical_threshold = 0.0;
  double gap = 0.0;  // empirical - theoretical, NaN when no crossing
};

struct TheoryComparison {
  std::vector<TheoryComparisonRow> rows;
  bool insufficient_sweep = false;  // fewer than two P1 points or no crossing found
};

// Empirical 50%-crossings against the asymptotic thresholds at the plan's
// (delta, P2, gamma1, gamma2); one row per W2.
inline TheoryComparison empirical_vs_theory(const ExperimentPlan& plan,
                                            const std::vector<CurvePoint>& pts,
                                            double threshold_tol = 1e-3) {
  TheoryComparison rep;
  const double delta = double(plan.m) / plan.n;
  const double g1 = double(plan.n1) / plan.n, g2 = double(plan.n2) / plan.n;
  if (plan.p1_list.size() < 2) rep.insufficient_sweep = true;
  for (double w2 : plan.w2_list) {
    TheoryComparisonRow row;
    row.W2 = w2;
    row.empirical_crossing = crossing_p1(pts, w2);
    row.theoretical_threshold = threshold_P1(delta, plan.P2, g1, g2, w2, threshold_tol);
    row.gap = row.empirical_crossing - row.theoretical_threshold;
    if (!std::isfinite(row.empirical_crossing)) rep.insufficient_sweep = true;
    rep.rows.push_back(row);
  }
  return rep;
}

// Pool-adjacent-violators fit of a non-increasing sequence; returns the fit.
inline std::vector<double> pava_nonincreasing(const std::vector<double>& v) {
  // fit non-decreasing to the reversed sequence, then reverse back
  std::vector<double> r(v.rbegin(), v.rend());
  std::vector<double> level;
  std::vector<int> count;
  for (double x : r) {
    level.push_back(x);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      double merged = (level[level.size() - 2] * count[count.size() - 2] +
                       level.back() * count.back()) /
                      (count[count.size() - 2] + count.back());
      count[count.size() - 2] += count.back();
      level[level.size() - 2] = merged;
      level.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> fit;
  for (std::size_t i = 0; i < level.size(); ++i)
    fit.insert(fit.end(), count[i], level[i]);
  return std::vector<double>(fit.rbegin(), fit.rend());
}

}  // namespace wl1
