#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wl1/special.hpp"

namespace wl1 {

struct RootBracketFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Proportional-growth description of the two-class model: delta = m/n,
// gamma_i = n_i/n, class sparsities P1/P2, weight ratio W (class-1 weight 1).
struct AsymptoticConfig {
  double delta = 0.5;
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  double P1 = 0.0;
  double P2 = 0.0;
  double W = 1.0;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    if (gamma1 < 0.0 || gamma2 < 0.0 || std::abs(gamma1 + gamma2 - 1.0) > 1e-12)
      throw std::invalid_argument("gamma1 + gamma2 must equal 1");
    if (P1 < 0.0 || P1 > 1.0 || P2 < 0.0 || P2 > 1.0)
      throw std::invalid_argument("P1, P2 must be in [0,1]");
    if (!(W > 0.0)) throw std::invalid_argument("W must be positive");
  }
  // support fraction nu = k/n and its weight energy omega = (sum_K w^2)/n
  double nu() const { return gamma1 * P1 + gamma2 * P2; }
  double omega() const { return gamma1 * P1 + W * W * gamma2 * P2; }
};

struct ExponentDiagnostics {
  double ext_residual = 0.0;  // stationarity residual at x0
  double int_residual = 0.0;  // saddle residual at s*
};

struct ExponentPoint {
  double t1p = 0.0, t2p = 0.0;
  double psi_com = 0.0, psi_int = 0.0, psi_ext = 0.0, psi_total = 0.0;
  ExponentDiagnostics diag{};
};

// exponent of the counting factor 2^{t1+t2} C(a1 n, t1 n) C(a2 n, t2 n)
inline double psi_com(double t1p, double t2p, const AsymptoticConfig& cfg) {
  const double a1 = cfg.gamma1 * (1.0 - cfg.P1);
  const double a2 = cfg.gamma2 * (1.0 - cfg.P2);
  const double tol = 1e-12;
  if (t1p < -tol || t2p < -tol || t1p > a1 + tol || t2p > a2 + tol)
    throw std::domain_error("psi_com: (t1p, t2p) outside the admissible rectangle");
  double v = (t1p + t2p) * kLn2;
  if (a1 > 0.0) v += a1 * binary_entropy(std::clamp(t1p / a1, 0.0, 1.0));
  if (a2 > 0.0) v += a2 * binary_entropy(std::clamp(t2p / a2, 0.0, 1.0));
  return v;
}

namespace detail {

// G(x) = erf(x); the decay exponent of the external angle solves
//   2 C x = D1 G'(x)/G(x) + W D2 G'(Wx)/G(Wx)    (monotone in x)
inline double solve_ext_root(double C, double D1, double D2, double W) {
  auto ge = [](double x) { return (2.0 / kSqrtPi) * std::exp(-x * x); };
  auto F = [&](double x) {
    double v = 2.0 * C * x;
    if (D1 > 0.0) v -= D1 * ge(x) / std::erf(x);
    if (D2 > 0.0) v -= W * D2 * ge(W * x) / std::erf(W * x);
    return v;
  };
  double hi = 1.0;
  while (F(hi) < 0.0 && hi < 1e10) hi *= 2.0;
  if (F(hi) < 0.0) throw RootBracketFailure("external exponent: no sign change up to 1e10");
  double lo = 1e-300;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (F(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// external-angle decay exponent (Laplace method on the angle integral)
inline double psi_ext(double t1p, double t2p, const AsymptoticConfig& cfg,
                      ExponentDiagnostics* diag = nullptr) {
  const double W = cfg.W;
  const double C = (t1p + cfg.gamma1 * cfg.P1) + W * W * (t2p + cfg.gamma2 * cfg.P2);
  const double D1 = std::max(cfg.gamma1 * (1.0 - cfg.P1) - t1p, 0.0);
  const double D2 = std::max(cfg.gamma2 * (1.0 - cfg.P2) - t2p, 0.0);
  if (D1 <= 1e-14 && D2 <= 1e-14) return 0.0;  // no facets left: angle tends to 1
  if (C <= 0.0) return 0.0;  // empty support-plus-face set
  const double x0 = detail::solve_ext_root(C, D1, D2, W);
  if (diag) {
    double r = 2.0 * C;
    if (D1 > 0.0) r -= D1 * (2.0 / kSqrtPi) * std::exp(-x0 * x0) / (x0 * std::erf(x0));
    if (D2 > 0.0) r -= W * D2 * (2.0 / kSqrtPi) * std::exp(-W * W * x0 * x0) / (x0 * std::erf(W * x0));
    diag->ext_residual = std::abs(r);
  }
  double v = C * x0 * x0;
  if (D1 > 0.0) v -= D1 * std::log(std::erf(x0));
  if (D2 > 0.0) v -= D2 * std::log(std::erf(W * x0));
  return v;
}

// internal-angle decay exponent via the convex conjugate of the shifted
// half-normal cumulant; tau = t1p + t2p must be positive.
inline double psi_int(double t1p, double t2p, const AsymptoticConfig& cfg,
                      ExponentDiagnostics* diag = nullptr) {
  const double tau = t1p + t2p;
  if (tau <= 0.0) throw std::domain_error("psi_int: t1p + t2p must be positive");
  const double W = cfg.W;
  const double om = cfg.omega();
  if (om <= 0.0) throw std::domain_error("psi_int: empty support");
  const double c1 = t1p / tau, c2 = t2p / tau;
  const double b = c1 + W * W * c2;
  const double target = tau / (tau * b + om);

  // Q(s) = c1 phi(s)/Phi(s) + c2 W phi(Ws)/Phi(Ws);  solve -s/Q(s) = target, s < 0
  auto Mhat = [&](double s) {
    double Q = c1 * gauss_pdf_over_cdf(s) + c2 * W * gauss_pdf_over_cdf(W * s);
    return -s / Q;
  };
  double shi = -1.0;
  while (Mhat(shi) < target && shi > -1e10) shi *= 2.0;
  if (Mhat(shi) < target) throw RootBracketFailure("internal exponent: saddle bracket failed");
  double slo = 0.0;
  for (int it = 0; it < 200 && slo - shi > 1e-14 * std::max(1.0, -shi); ++it) {
    double mid = 0.5 * (slo + shi);
    (Mhat(mid) < target ? slo : shi) = mid;
  }
  const double s = 0.5 * (slo + shi);
  if (diag) diag->int_residual = std::abs(Mhat(s) - target);

  const double y = -s * om / tau;  // = s (b - 1/Mhat(s)) at the saddle
  // half-normal cumulant Lambda1(x) = x^2/2 + log(2 Phi(x)) = log erfcx(-x/sqrt(2))
  auto lam1 = [](double x) { return std::log(erfcx(-x / std::sqrt(2.0))); };
  const double lam_star = s * y - c1 * lam1(s) - c2 * lam1(W * s);
  return tau * (lam_star + (tau / (2.0 * om)) * y * y + kLn2);
}

inline ExponentPoint evaluate_point(double t1p, double t2p, const AsymptoticConfig& cfg) {
  ExponentPoint p;
  p.t1p = t1p;
  p.t2p = t2p;
  p.psi_com = psi_com(t1p, t2p, cfg);
  p.psi_int = (t1p + t2p > 0.0) ? psi_int(t1p, t2p, cfg, &p.diag) : 0.0;
  p.psi_ext = psi_ext(t1p, t2p, cfg, &p.diag);
  p.psi_total = p.psi_com - p.psi_int - p.psi_ext;
  return p;
}

struct ExponentSurface {
  std::vector<ExponentPoint> points;  // admissible grid points only

  void write_csv(std::ostream& os) const {
    os << "t1p,t2p,psi_com,psi_int,psi_ext,psi_total\n";
    char buf[256];
    for (const auto& p : points) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.t1p,
                    p.t2p, p.psi_com, p.psi_int, p.psi_ext, p.psi_total);
      os << buf;
    }
  }
};

struct RecoverabilityResult {
  bool recoverable = false;
  double max_psi = -std::numeric_limits<double>::infinity();
  ExponentPoint argmax{};
  ExponentSurface surface{};
  std::string note;
};

struct ExponentGridOptions {
  int grid_n = 200;       // points per axis
  int refine_iters = 300; // Nelder-Mead budget around the grid maximum
  bool keep_surface = true;
};

namespace detail {

// Nelder-Mead ascent of f over the admissible box with the linear cut
// t1p + t2p >= tau_min; inadmissible proposals are rejected via -inf.
inline void nelder_mead_max(const std::function<double(double, double)>& f, double& x0,
                            double& y0, double& f0, double hx, double hy, int iters) {
  struct V {
    double x, y, f;
  };
  std::array<V, 3> s{{{x0, y0, f0},
                      {x0 + hx, y0, f(x0 + hx, y0)},
                      {x0, y0 + hy, f(x0, y0 + hy)}}};
  auto order = [&] { std::sort(s.begin(), s.end(), [](const V& a, const V& b) { return a.f > b.f; }); };
  order();
  for (int it = 0; it < iters; ++it) {
    double cx = 0.5 * (s[0].x + s[1].x), cy = 0.5 * (s[0].y + s[1].y);
    V r{cx + (cx - s[2].x), cy + (cy - s[2].y), 0.0};
    r.f = f(r.x, r.y);
    if (r.f > s[0].f) {
      V e{cx + 2.0 * (cx - s[2].x), cy + 2.0 * (cy - s[2].y), 0.0};
      e.f = f(e.x, e.y);
      s[2] = (e.f > r.f) ? e : r;
    } else if (r.f > s[1].f) {
      s[2] = r;
    } else {
      V c{cx + 0.5 * (s[2].x - cx), cy + 0.5 * (s[2].y - cy), 0.0};
      c.f = f(c.x, c.y);
      if (c.f > s[2].f) {
        s[2] = c;
      } else {
        for (int j = 1; j < 3; ++j) {
          s[j].x = 0.5 * (s[j].x + s[0].x);
          s[j].y = 0.5 * (s[j].y + s[0].y);
          s[j].f = f(s[j].x, s[j].y);
        }
      }
    }
    order();
    double spread = std::max(std::abs(s[0].x - s[2].x), std::abs(s[0].y - s[2].y));
    if (spread < 1e-14 && std::abs(s[0].f - s[2].f) < 1e-15) break;
  }
  x0 = s[0].x;
  y0 = s[0].y;
  f0 = s[0].f;
}

}  // namespace detail

// Decide asymptotic recoverability: the failure exponent
// psi_com - psi_int - psi_ext must be strictly negative over the whole
// admissible face range.  In the failing regime the supremum equals zero
// exactly (the union bound saturates), so classification compares the
// refined maximum against a small negative band rather than plain zero.
inline RecoverabilityResult recoverable(const AsymptoticConfig& cfg, double margin = 0.0,
                                        const ExponentGridOptions& opts = {}) {
  cfg.validate();
  if (margin < 0.0) throw std::invalid_argument("recoverable: margin must be >= 0");
  RecoverabilityResult res;
  const double nu = cfg.nu();
  if (nu <= 0.0) {
    res.recoverable = true;
    res.note = "empty support";
    return res;
  }
  if (nu >= cfg.delta) {
    res.recoverable = false;
    res.max_psi = std::numeric_limits<double>::infinity();
    res.note = "support fraction meets or exceeds measurement fraction";
    return res;
  }

  const double a1 = cfg.gamma1 * (1.0 - cfg.P1);
  const double a2 = cfg.gamma2 * (1.0 - cfg.P2);
  const double tau_min = cfg.delta - nu;  // faces with t1p+t2p <= tau_min do not matter

  auto axis = [&](double amax) {
    std::vector<double> v;
    if (amax <= 0.0) {
      v.push_back(0.0);  // degenerate class: the only admissible value is exact zero
      return v;
    }
    int N = std::max(opts.grid_n, 2);
    v.reserve(N);
    for (int i = 0; i < N; ++i) v.push_back(amax * i / (N - 1));
    return v;
  };

  // project an arbitrary proposal onto the admissible set: clamp to the box,
  // then push along the remaining headroom until the cut is satisfied
  auto project = [&](double x, double y) -> std::pair<double, double> {
    double t1 = std::clamp(x, 0.0, a1), t2 = std::clamp(y, 0.0, a2);
    double need = tau_min + 1e-12 - (t1 + t2);
    if (need > 0.0) {
      double h1 = a1 - t1, h2 = a2 - t2, h = h1 + h2;
      if (h > 0.0) {
        t1 = std::min(t1 + need * h1 / h, a1);
        t2 = std::min(t2 + need * h2 / h, a2);
      }
    }
    return {t1, t2};
  };
  auto psi_at = [&](double x, double y) -> double {
    auto [t1p, t2p] = project(x, y);
    if (t1p + t2p <= tau_min) return -std::numeric_limits<double>::infinity();
    return evaluate_point(t1p, t2p, cfg).psi_total;
  };

  bool found = false;
  double bx = a1, by = a2, bf = -std::numeric_limits<double>::infinity();
  for (double t1p : axis(a1)) {
    for (double t2p : axis(a2)) {
      if (t1p + t2p <= tau_min) continue;
      ExponentPoint p = evaluate_point(t1p, t2p, cfg);
      if (opts.keep_surface) res.surface.points.push_back(p);
      if (p.psi_total > bf) {
        bf = p.psi_total;
        bx = t1p;
        by = t2p;
        found = true;
      }
    }
  }
  if (!found) bf = psi_at(bx, by);  // corner is always admissible for delta < 1

  double hx = std::max(a1 / (2.0 * opts.grid_n), 1e-7);
  double hy = std::max(a2 / (2.0 * opts.grid_n), 1e-7);
  detail::nelder_mead_max(psi_at, bx, by, bf, -hx, -hy, opts.refine_iters);
  detail::nelder_mead_max(psi_at, bx, by, bf, hx, hy, opts.refine_iters);

  auto [t1b, t2b] = project(bx, by);
  res.max_psi = bf;
  res.argmax = evaluate_point(t1b, t2b, cfg);
  // zero band: in the failing regime the true supremum is exactly 0, reached
  // to ~1e-15 by the refinement; anything above -1e-9 is treated as failing
  const double band = std::max(margin, 1e-9);
  res.recoverable = (bf < -band);
  return res;
}

// largest P1 with a negative exponent surface, by bisection to tol
inline double threshold_P1(double delta, double P2, double gamma1, double gamma2, double W,
                           double tol = 1e-3, double margin = 0.0,
                           const ExponentGridOptions& opts = {}) {
  AsymptoticConfig cfg{delta, gamma1, gamma2, 0.0, P2, W};
  ExponentGridOptions fast = opts;
  fast.keep_surface = false;
  auto ok = [&](double P1) {
    cfg.P1 = P1;
    return recoverable(cfg, margin, fast).recoverable;
  };
  cfg.validate();
  if (!ok(0.0)) return 0.0;
  if (ok(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct OptimalWeightResult {
  double W_star = 1.0;
  double P1_star = 0.0;
  int evaluations = 0;
};

struct OptimalWeightOptions {
  double W_max = 10.0;
  double tol_W = 1e-2;
  double inner_tol = 1e-5;  // threshold bisection tolerance inside the search
  ExponentGridOptions grid{};
};

// golden-section search of threshold_P1 over W in [1, W_max]; the curve is
// unimodal in W.  Near-flat optima snap to W = 1 so the symmetric model
// reports the unweighted solution.
inline OptimalWeightResult optimal_weight(double delta, double P2, double gamma1,
                                          double gamma2, const OptimalWeightOptions& opts = {}) {
  OptimalWeightResult res;
  ExponentGridOptions grid = opts.grid;
  grid.keep_surface = false;
  auto th = [&](double W) {
    ++res.evaluations;
    return threshold_P1(delta, P2, gamma1, gamma2, W, opts.inner_tol, 0.0, grid);
  };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1.0, b = opts.W_max;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = th(c), fd = th(d);
  while (b - a > opts.tol_W) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = th(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = th(d);
    }
  }
  res.W_star = 0.5 * (a + b);
  res.P1_star = th(res.W_star);
  // plateau handling: if weighting does not beat the unweighted threshold at
  // the search's resolution, report W = 1
  double th1 = th(1.0);
  if (std::abs(res.P1_star - th1) <= 2.0 * opts.inner_tol || th1 > res.P1_star) {
    res.W_star = 1.0;
    res.P1_star = th1;
  }
  return res;
}

}  // namespace wl1
