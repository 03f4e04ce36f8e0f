#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wl1/model.hpp"

namespace wl1 {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, NumericalFailure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterLimit: return "iteration_limit";
    default: return "numerical_failure";
  }
}

// minimize c'x subject to E x = d, x >= lb (lb entries may be -inf)
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd E;
  Eigen::VectorXd d;
  Eigen::VectorXd lb;

  static LinearProgram standard(Eigen::VectorXd c_, Eigen::MatrixXd E_, Eigen::VectorXd d_) {
    LinearProgram lp;
    lp.c = std::move(c_);
    lp.E = std::move(E_);
    lp.d = std::move(d_);
    lp.lb = Eigen::VectorXd::Zero(lp.c.size());
    return lp;
  }
};

struct IterateInfo {
  int iter = 0;
  double mu = 0.0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double comp_sum = 0.0;       // x's, bilinear residual
  double weak_gap_cert = 0.0;  // (c'x - b'y) + |rc'x| + |rb'y|; equals x's + rounding, so >= 0
};

struct SolverOptions {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 200;
  bool record_iterates = false;
};

struct LpSolution {
  Eigen::VectorXd x;  // in the caller's variables
  Eigen::VectorXd y;  // duals of the original equality rows
  double objective = 0.0;
  LpStatus status = LpStatus::NumericalFailure;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;      // |c'x - d'y| / (1 + |c'x|)
  double comp_residual = 0.0;    // x's at the returned point (standard form)
  bool degenerate_face = false;  // x_i ~ 0 and s_i ~ 0 simultaneously
  std::string message;
  std::vector<IterateInfo> iterates;
};

namespace detail {

// Standard-form data after presolve: min c'z, A z = b, z >= 0.
struct StdForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b, c;
  std::vector<int> kept_rows;
  // column map back to original variables: z contributes sign * z_j to var orig
  struct Col { int orig; double sign; };
  std::vector<Col> cols;
  Eigen::VectorXd shift;  // x = (mapped z) + shift
  double obj_shift = 0.0;
  bool infeasible_row = false;
};

inline StdForm standardize(const LinearProgram& lp) {
  const auto inf = std::numeric_limits<double>::infinity();
  const Eigen::Index m = lp.E.rows(), n = lp.E.cols();
  if (lp.c.size() != n || lp.d.size() != m || lp.lb.size() != n)
    throw std::invalid_argument("LinearProgram: dimension mismatch");
  StdForm sf;
  sf.shift = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
    if (lp.lb[j] != -inf) sf.shift[j] = lp.lb[j];

  // drop structurally zero rows; inconsistent ones mean infeasibility
  Eigen::VectorXd d_eff = lp.d - lp.E * sf.shift;
  double rowscale = std::max(1.0, lp.E.size() > 0 ? lp.E.cwiseAbs().maxCoeff() : 0.0);
  double dscale_abs = 1.0 + (m > 0 ? lp.d.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    double rowmax = (n > 0) ? lp.E.row(i).cwiseAbs().maxCoeff() : 0.0;
    if (rowmax <= 1e-14 * rowscale) {
      if (std::abs(d_eff[i]) > 1e-10 * dscale_abs)
        sf.infeasible_row = true;
    } else {
      sf.kept_rows.push_back(static_cast<int>(i));
    }
  }
  sf.obj_shift = lp.c.dot(sf.shift);

  // split free variables, shift bounded ones
  for (Eigen::Index j = 0; j < n; ++j) {
    sf.cols.push_back({static_cast<int>(j), 1.0});
    if (lp.lb[j] == -inf) sf.cols.push_back({static_cast<int>(j), -1.0});
  }
  const Eigen::Index mk = static_cast<Eigen::Index>(sf.kept_rows.size());
  const Eigen::Index nk = static_cast<Eigen::Index>(sf.cols.size());
  sf.A.resize(mk, nk);
  sf.b.resize(mk);
  sf.c.resize(nk);
  for (Eigen::Index i = 0; i < mk; ++i) sf.b[i] = d_eff[sf.kept_rows[i]];
  for (Eigen::Index jj = 0; jj < nk; ++jj) {
    const auto& col = sf.cols[jj];
    sf.c[jj] = col.sign * lp.c[col.orig];
    for (Eigen::Index i = 0; i < mk; ++i)
      sf.A(i, jj) = col.sign * lp.E(sf.kept_rows[i], col.orig);
  }
  return sf;
}

inline double step_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

}  // namespace detail

// Mehrotra predictor-corrector on the standardized problem.  Dense Cholesky
// of the m-by-m normal matrix A D A'; fraction-to-boundary 0.995.
inline LpSolution solve(const LinearProgram& lp, const SolverOptions& opts = {}) {
  LpSolution sol;
  detail::StdForm sf = detail::standardize(lp);
  sol.x = Eigen::VectorXd::Zero(lp.c.size());
  sol.y = Eigen::VectorXd::Zero(lp.d.size());
  if (sf.infeasible_row) {
    sol.status = LpStatus::Infeasible;
    sol.message = "inconsistent zero row";
    return sol;
  }

  const Eigen::Index m = sf.A.rows(), n = sf.A.cols();
  auto finish = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
    sol.x = sf.shift;
    for (Eigen::Index j = 0; j < n; ++j) sol.x[sf.cols[j].orig] += sf.cols[j].sign * z[j];
    for (Eigen::Index i = 0; i < m; ++i) sol.y[sf.kept_rows[i]] = y[i];
    sol.objective = lp.c.dot(sol.x);
  };

  if (n == 0) {
    // no variables: feasible iff b = 0 (zero rows were already screened)
    sol.status = (m == 0 || sf.b.cwiseAbs().maxCoeff() <= opts.tol_feas)
                     ? LpStatus::Optimal
                     : LpStatus::Infeasible;
    sol.objective = sf.obj_shift;
    return sol;
  }
  if (m == 0) {
    // separable: min c'z over z >= 0
    for (Eigen::Index j = 0; j < n; ++j)
      if (sf.c[j] < 0.0) {
        sol.status = LpStatus::Unbounded;
        sol.message = "cost improves along a free ray";
        return sol;
      }
    finish(Eigen::VectorXd::Zero(n), Eigen::VectorXd());
    sol.status = LpStatus::Optimal;
    return sol;
  }

  Eigen::MatrixXd M(m, m);
  Eigen::LLT<Eigen::MatrixXd> llt;
  auto factor_normal = [&](const Eigen::VectorXd& dscale) -> bool {
    Eigen::MatrixXd AD = sf.A * dscale.cwiseSqrt().asDiagonal();
    M.setZero();
    M.selfadjointView<Eigen::Lower>().rankUpdate(AD);
    double ridge = 0.0;
    double scale = std::max(1.0, M.diagonal().maxCoeff());
    for (int attempt = 0; attempt < 6; ++attempt) {
      Eigen::MatrixXd Mr = M;
      if (ridge > 0.0) Mr.diagonal().array() += ridge;
      llt.compute(Mr.selfadjointView<Eigen::Lower>());
      if (llt.info() == Eigen::Success) return true;
      ridge = (ridge == 0.0) ? 1e-12 * scale : ridge * 100.0;
    }
    return false;
  };

  // Mehrotra least-squares starting point
  if (!factor_normal(Eigen::VectorXd::Ones(n))) {
    sol.status = LpStatus::NumericalFailure;
    sol.message = "rank-deficient equality system";
    return sol;
  }
  Eigen::VectorXd x = sf.A.transpose() * llt.solve(sf.b);
  Eigen::VectorXd y = llt.solve(sf.A * sf.c);
  Eigen::VectorXd s = sf.c - sf.A.transpose() * y;
  {
    double dx = std::max(-1.5 * x.minCoeff(), 0.0);
    double ds = std::max(-1.5 * s.minCoeff(), 0.0);
    x.array() += dx;
    s.array() += ds;
    double xs = x.dot(s);
    double dxh = (s.sum() > 0) ? 0.5 * xs / s.sum() : 1.0;
    double dsh = (x.sum() > 0) ? 0.5 * xs / x.sum() : 1.0;
    x.array() += (xs > 0 ? dxh : 1.0);
    s.array() += (xs > 0 ? dsh : 1.0);
  }

  const double bnorm = 1.0 + sf.b.lpNorm<Eigen::Infinity>();
  const double cnorm = 1.0 + sf.c.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd rb(m), rc(n), dscale(n), v(n), dy(m), ds(n), dx(n);
  Eigen::VectorXd dy_c(m), ds_c(n), dx_c(n);

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    rb = sf.b - sf.A * x;
    rc = sf.c - sf.A.transpose() * y - s;
    double mu = x.dot(s) / static_cast<double>(n);
    double pres = rb.lpNorm<Eigen::Infinity>() / bnorm;
    double dres = rc.lpNorm<Eigen::Infinity>() / cnorm;
    double pobj = sf.c.dot(x), dobj = sf.b.dot(y);
    double comp = x.dot(s);

    if (opts.record_iterates) {
      double cert = (pobj - dobj) + std::abs(rc.dot(x)) + std::abs(rb.dot(y));
      sol.iterates.push_back({iter, mu, pobj + sf.obj_shift, dobj + sf.obj_shift,
                              pres, dres, comp, cert});
    }
    sol.iterations = iter;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.comp_residual = comp;
    sol.duality_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

    if (pres <= 0.25 * opts.tol_feas && dres <= 0.25 * opts.tol_feas &&
        comp <= 0.25 * opts.tol_gap * (1.0 + std::abs(pobj))) {
      finish(x, y);
      sol.status = LpStatus::Optimal;
      // degenerate-face diagnostics: a zero-zero pair breaks strict
      // complementarity, and more than m vanishing reduced costs means the
      // optimal face has positive dimension (optimizer may not be unique)
      double xscale = 1.0 + x.lpNorm<Eigen::Infinity>();
      double sscale = 1.0 + s.lpNorm<Eigen::Infinity>();
      Eigen::Index zero_s = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (s[j] < 1e-7 * sscale) ++zero_s;
        if (x[j] < 1e-7 * xscale && s[j] < 1e-7 * sscale) sol.degenerate_face = true;
      }
      if (zero_s > m) sol.degenerate_face = true;
      return sol;
    }
    if (iter == opts.max_iter) break;

    // divergence heuristics (our LPs are feasible and bounded; these guard
    // against malformed input rather than certify rigorously)
    double xmax = x.lpNorm<Eigen::Infinity>();
    if (xmax > 1e13 || mu > 1e14) {
      sol.status = (pobj < -1e12 && pres <= 1e-6) ? LpStatus::Unbounded : LpStatus::Infeasible;
      sol.message = "iterates diverged";
      finish(x, y);
      return sol;
    }

    dscale = x.cwiseQuotient(s);
    if (!factor_normal(dscale)) {
      finish(x, y);
      sol.status = LpStatus::NumericalFailure;
      sol.message = "normal equations lost positive definiteness";
      return sol;
    }

    // affine predictor: v = -x.*s
    v = -x.cwiseProduct(s);
    dy = llt.solve(rb - sf.A * ((v - x.cwiseProduct(rc)).cwiseQuotient(s)));
    ds = rc - sf.A.transpose() * dy;
    dx = (v - x.cwiseProduct(ds)).cwiseQuotient(s);

    double ap = std::min(1.0, detail::step_to_boundary(x, dx));
    double ad = std::min(1.0, detail::step_to_boundary(s, ds));
    double mu_aff = (x + ap * dx).dot(s + ad * ds) / static_cast<double>(n);
    double sigma = std::pow(mu_aff / mu, 3);

    // corrector with centering
    v = -x.cwiseProduct(s) - dx.cwiseProduct(ds);
    v.array() += sigma * mu;
    dy_c = llt.solve(rb - sf.A * ((v - x.cwiseProduct(rc)).cwiseQuotient(s)));
    ds_c = rc - sf.A.transpose() * dy_c;
    dx_c = (v - x.cwiseProduct(ds_c)).cwiseQuotient(s);

    ap = std::min(1.0, 0.995 * detail::step_to_boundary(x, dx_c));
    ad = std::min(1.0, 0.995 * detail::step_to_boundary(s, ds_c));
    x += ap * dx_c;
    y += ad * dy_c;
    s += ad * ds_c;
  }

  finish(x, y);
  sol.status = LpStatus::IterLimit;
  sol.message = "iteration cap reached";
  return sol;
}

// The weighted-l1 program  min sum_i w_i |x_i|  s.t. A x = y  in split form:
// variables (u, v), x = u - v, minimize w'(u+v) subject to A(u-v) = y.
inline LinearProgram build_weighted_l1_lp(const Eigen::MatrixXd& A,
                                          const Eigen::VectorXd& y,
                                          const WeightScheme& w) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (y.size() != m || w.weights.size() != n)
    throw std::invalid_argument("build_weighted_l1_lp: dimension mismatch");
  LinearProgram lp;
  lp.c.resize(2 * n);
  lp.c << w.weights, w.weights;
  lp.E.resize(m, 2 * n);
  lp.E << A, -A;
  lp.d = y;
  lp.lb = Eigen::VectorXd::Zero(2 * n);
  return lp;
}

}  // namespace wl1
