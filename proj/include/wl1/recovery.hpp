#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wl1/lp.hpp"
#include "wl1/model.hpp"

namespace wl1 {

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RecoveryOptions {
  double success_tol = 1e-6;  // relative max-abs error threshold
  SolverOptions solver{};
};

struct RecoveryResult {
  Eigen::VectorXd x_hat;
  double objective = 0.0;  // weighted norm of x_hat
  LpStatus status = LpStatus::NumericalFailure;
  bool success = false;
  double max_abs_error = std::numeric_limits<double>::quiet_NaN();
  bool non_unique = false;  // LP sat on a degenerate face: optimum may not be unique
  int iterations = 0;
};

// min sum w_i |x_i| subject to A x = y, via the split LP; success judged
// against ground truth when supplied (relative max-abs error <= success_tol).
inline RecoveryResult recover(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                              const WeightScheme& w,
                              const Eigen::VectorXd* x_true = nullptr,
                              const RecoveryOptions& opts = {}) {
  LinearProgram lp = build_weighted_l1_lp(A, y, w);
  LpSolution sol = solve(lp, opts.solver);
  const Eigen::Index n = A.cols();
  RecoveryResult r;
  r.status = sol.status;
  r.iterations = sol.iterations;
  r.non_unique = sol.degenerate_face;
  r.x_hat = sol.x.head(n) - sol.x.tail(n);
  r.objective = weighted_norm(r.x_hat, w);
  if (x_true) {
    r.max_abs_error = (r.x_hat - *x_true).lpNorm<Eigen::Infinity>();
    double scale = std::max(1.0, x_true->lpNorm<Eigen::Infinity>());
    r.success = (sol.status == LpStatus::Optimal) && (r.max_abs_error <= opts.success_tol * scale);
  } else {
    r.success = (sol.status == LpStatus::Optimal);
  }
  return r;
}

inline RecoveryResult recover(const ProblemInstance& inst, const WeightScheme& w,
                              const RecoveryOptions& opts = {}) {
  return recover(inst.A, inst.y, w, &inst.x_true.x, opts);
}

namespace detail {

struct KernelSplit {
  Eigen::MatrixXd rowspace;  // orthonormal basis of row(A), n x r
  Eigen::MatrixXd kernel;    // orthonormal basis of ker(A), n x (n - r)
};

inline KernelSplit kernel_split(const Eigen::MatrixXd& A) {
  // both bases from one full SVD; V's leading columns span row(A)
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double tol = std::max(A.rows(), A.cols()) * (sv.size() ? sv[0] : 0.0) * 1e-13;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  return {svd.matrixV().leftCols(rank), svd.matrixV().rightCols(A.cols() - rank)};
}

inline Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& A) {
  return kernel_split(A).kernel;
}

}  // namespace detail

// Exact check that every z in ker(A) satisfies
//   sum_{i in K} w_i |z_i| <= sum_{i not in K} w_i |z_i|.
// Enumerates sign orthants (z and -z share a verdict, so 2^{n-1} of them);
// in each orthant the check is one LP over the cone {zeta = s.*z >= 0,
// z in ker(A)} with normalization a'zeta + tau = 1, whose optimum is exactly
// 0 or 1.  Kernel membership enters as U'(s.*zeta) = 0 against an orthonormal
// row-space basis U, so every LP variable is nonnegative: free variables would
// be split by the standard-form pass and leave the optimal face unbounded,
// which stalls the interior-point iteration.
inline bool nullspace_condition(const Eigen::MatrixXd& A, const std::vector<int>& K,
                                const WeightScheme& w, int cap = 16) {
  const int n = static_cast<int>(A.cols());
  if (n > cap) throw CapExceeded("nullspace_condition: n exceeds exact-enumeration cap");
  if (w.weights.size() != n) throw std::invalid_argument("nullspace_condition: weight size");
  detail::KernelSplit ks = detail::kernel_split(A);
  const int dnull = static_cast<int>(ks.kernel.cols());
  if (dnull == 0) return true;  // trivial null space
  const int r = n - dnull;

  std::vector<char> in_K(n, 0);
  for (int i : K) {
    if (i < 0 || i >= n) throw std::invalid_argument("nullspace_condition: index out of range");
    in_K[i] = 1;
  }
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a[i] = in_K[i] ? w.weights[i] : -w.weights[i];

  SolverOptions sopts;
  // vars: zeta (n, >=0), tau (>=0)
  const int nv = n + 1;
  for (std::uint64_t mask = 0; mask < (1ull << (n - 1)); ++mask) {
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < n; ++i) lp.c[i] = -a[i];  // maximize a'zeta
    lp.E = Eigen::MatrixXd::Zero(r + 1, nv);
    lp.d = Eigen::VectorXd::Zero(r + 1);
    lp.lb = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < n; ++i) {
      double s = (i == 0) ? 1.0 : ((mask >> (i - 1)) & 1 ? -1.0 : 1.0);
      for (int j = 0; j < r; ++j) lp.E(j, i) = s * ks.rowspace(i, j);
    }
    lp.E.row(r).head(n) = a.transpose();
    lp.E(r, n) = 1.0;
    lp.d[r] = 1.0;
    LpSolution sol = solve(lp, sopts);
    if (sol.status != LpStatus::Optimal)
      throw std::runtime_error("nullspace_condition: orthant LP did not certify");
    if (-sol.objective > 0.5) return false;  // optimum is 0 or 1 exactly
  }
  return true;
}

struct BruteForceResult {
  bool feasible = false;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
};

// Independent oracle for the weighted-l1 LP at toy sizes: enumerate all
// basic solutions of the split form and keep the feasible one of least cost.
inline BruteForceResult recovery_oracle_bruteforce(const Eigen::MatrixXd& A,
                                                   const Eigen::VectorXd& y,
                                                   const WeightScheme& w) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  if (n > 8 || m > 8) throw CapExceeded("recovery_oracle_bruteforce: size cap is n<=8, m<=8");

  Eigen::MatrixXd E(m, 2 * n);
  E << A, -A;
  Eigen::VectorXd c(2 * n);
  c << w.weights, w.weights;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  double rtol = std::max(m, n) * (sv.size() ? sv[0] : 0.0) * 1e-13;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rtol) ++rank;

  BruteForceResult best;
  double ytol = 1e-9 * (1.0 + y.cwiseAbs().maxCoeff());
  if (rank == 0) {
    best.feasible = y.cwiseAbs().maxCoeff() <= ytol;
    if (best.feasible) {
      best.x = Eigen::VectorXd::Zero(n);
      best.objective = 0.0;
    }
    return best;
  }

  std::vector<int> idx(rank);
  // iterate over all rank-sized column subsets of E in lexicographic order
  for (int i = 0; i < rank; ++i) idx[i] = i;
  const int ncols = 2 * n;
  while (true) {
    Eigen::MatrixXd B(m, rank);
    for (int j = 0; j < rank; ++j) B.col(j) = E.col(idx[j]);
    Eigen::VectorXd xb = B.completeOrthogonalDecomposition().solve(y);
    if ((B * xb - y).cwiseAbs().maxCoeff() <= ytol && xb.minCoeff() >= -1e-9) {
      double obj = 0.0;
      for (int j = 0; j < rank; ++j) obj += c[idx[j]] * std::max(xb[j], 0.0);
      if (obj < best.objective) {
        best.feasible = true;
        best.objective = obj;
        Eigen::VectorXd z = Eigen::VectorXd::Zero(ncols);
        for (int j = 0; j < rank; ++j) z[idx[j]] = std::max(xb[j], 0.0);
        best.x = z.head(n) - z.tail(n);
      }
    }
    int p = rank - 1;
    while (p >= 0 && idx[p] == ncols - rank + p) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < rank; ++q) idx[q] = idx[q - 1] + 1;
  }
  return best;
}

}  // namespace wl1
