#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "wl1/rng.hpp"

namespace wl1 {

// Two-class sparsity ensemble: indices in class 1 are nonzero with
// probability P1, class 2 with probability P2.  By default class 1 is the
// first n1 indices; an explicit layout permutation is accepted so tests can
// check permutation invariance.
struct SparsityModel {
  int n = 0;
  int n1 = 0;
  int n2 = 0;
  double P1 = 0.0;
  double P2 = 0.0;
  std::vector<int> class_of;  // size n, values 1 or 2

  static SparsityModel contiguous(int n, int n1, double P1, double P2) {
    if (n <= 0 || n1 < 0 || n1 > n)
      throw std::invalid_argument("SparsityModel: class sizes must satisfy n1+n2=n");
    SparsityModel m;
    m.n = n;
    m.n1 = n1;
    m.n2 = n - n1;
    m.P1 = P1;
    m.P2 = P2;
    m.class_of.assign(n, 2);
    for (int i = 0; i < n1; ++i) m.class_of[i] = 1;
    m.validate();
    return m;
  }

  void validate() const {
    if (n <= 0 || n1 < 0 || n2 < 0 || n1 + n2 != n)
      throw std::invalid_argument("SparsityModel: class sizes must satisfy n1+n2=n");
    if (!(P1 >= 0.0 && P1 <= 1.0 && P2 >= 0.0 && P2 <= 1.0))
      throw std::invalid_argument("SparsityModel: probabilities must lie in [0,1]");
    if (static_cast<int>(class_of.size()) != n)
      throw std::invalid_argument("SparsityModel: class_of size mismatch");
    int c1 = 0, c2 = 0;
    for (int c : class_of) {
      if (c == 1) ++c1;
      else if (c == 2) ++c2;
      else throw std::invalid_argument("SparsityModel: class labels must be 1 or 2");
    }
    if (c1 != n1 || c2 != n2)
      throw std::invalid_argument("SparsityModel: class counts disagree with n1/n2");
  }
};

// Two-valued weights, W1 normalized to 1.
struct WeightScheme {
  double W1 = 1.0;
  double W2 = 1.0;
  Eigen::VectorXd weights;

  static WeightScheme for_model(const SparsityModel& m, double W2) {
    if (!(W2 > 0.0)) throw std::invalid_argument("WeightScheme: W2 must be positive");
    WeightScheme w;
    w.W2 = W2;
    w.weights.resize(m.n);
    for (int i = 0; i < m.n; ++i) w.weights[i] = (m.class_of[i] == 1) ? 1.0 : W2;
    return w;
  }
};

enum class AmplitudeLaw { Gaussian, Rademacher };

inline const char* to_string(AmplitudeLaw a) {
  return a == AmplitudeLaw::Gaussian ? "gaussian" : "rademacher";
}

inline AmplitudeLaw amplitude_from_string(const std::string& s) {
  if (s == "gaussian") return AmplitudeLaw::Gaussian;
  if (s == "rademacher") return AmplitudeLaw::Rademacher;
  throw std::invalid_argument("unknown amplitude law: " + s);
}

struct SparseSignal {
  Eigen::VectorXd x;
  std::vector<int> support;  // sorted indices with x[i] != 0
  std::vector<int> signs;    // sign per support entry
};

struct ProblemInstance {
  Eigen::MatrixXd A;
  SparseSignal x_true;
  Eigen::VectorXd y;
  std::uint64_t seed = 0;
};

inline SparseSignal generate_signal(const SparsityModel& m, AmplitudeLaw law,
                                    std::uint64_t seed) {
  m.validate();
  SparseSignal s;
  s.x = Eigen::VectorXd::Zero(m.n);
  CounterRng usup(seed, kStreamSupport);
  CounterRng uamp(seed, kStreamAmplitude);
  for (int i = 0; i < m.n; ++i) {
    double p = (m.class_of[i] == 1) ? m.P1 : m.P2;
    double u = usup.uniform01();
    double a = (law == AmplitudeLaw::Gaussian) ? uamp.normal() : uamp.rademacher();
    if (u <= p) {
      // amplitude consumed unconditionally so the support draw at index i
      // never shifts amplitude counters of later indices
      if (a == 0.0) a = 1.0;  // measure-zero guard; keeps "nonzero exactly on K"
      s.x[i] = a;
      s.support.push_back(i);
      s.signs.push_back(a > 0.0 ? 1 : -1);
    }
  }
  return s;
}

inline bool is_typical(const std::vector<int>& support, const SparsityModel& m,
                       double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("is_typical: eps must be positive");
  double hit1 = 0, hit2 = 0;
  for (int i : support) {
    if (i < 0 || i >= m.n) throw std::out_of_range("is_typical: index out of range");
    (m.class_of[i] == 1 ? hit1 : hit2) += 1.0;
  }
  double d1 = std::abs(hit1 - m.n1 * m.P1);
  double d2 = std::abs(hit2 - m.n2 * m.P2);
  return d1 <= eps * m.n && d2 <= eps * m.n;
}

inline ProblemInstance gaussian_instance(const SparsityModel& m, int rows,
                                         AmplitudeLaw law, std::uint64_t seed) {
  if (!(rows > 0 && rows < m.n))
    throw std::invalid_argument("gaussian_instance: need 0 < m < n");
  ProblemInstance inst;
  inst.seed = seed;
  inst.x_true = generate_signal(m, law, seed);
  CounterRng g(seed, kStreamMatrix);
  inst.A.resize(rows, m.n);
  // row-major fill order is part of the reproducibility contract
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < m.n; ++c) inst.A(r, c) = g.normal();
  inst.y = inst.A * inst.x_true.x;
  return inst;
}

inline double weighted_norm(const Eigen::VectorXd& x, const WeightScheme& w) {
  if (x.size() != w.weights.size())
    throw std::invalid_argument("weighted_norm: dimension mismatch");
  return w.weights.cwiseProduct(x.cwiseAbs()).sum();
}

// FNV-1a over the raw bytes of A and x_true; used to verify that paired
// trials really reuse the identical instance across weight values.
inline std::uint64_t instance_hash(const ProblemInstance& inst) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix_bytes = [&h](const double* p, std::ptrdiff_t count) {
    const unsigned char* b = reinterpret_cast<const unsigned char*>(p);
    for (std::ptrdiff_t i = 0; i < count * static_cast<std::ptrdiff_t>(sizeof(double)); ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  mix_bytes(inst.A.data(), inst.A.size());
  mix_bytes(inst.x_true.x.data(), inst.x_true.x.size());
  return h;
}

}  // namespace wl1
