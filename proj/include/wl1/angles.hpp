#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "wl1/model.hpp"
#include "wl1/quadrature.hpp"
#include "wl1/special.hpp"

namespace wl1 {

// A face-pair query at finite n: support size k split over the two classes,
// t1/t2 extra face indices drawn from the off-support part of each class.
struct AngleQuery {
  SparsityModel model;
  double W2 = 1.0;
  int k = 0;
  int t1 = 0;
  int t2 = 0;

  void validate() const {
    model.validate();
    if (W2 <= 0.0) throw std::invalid_argument("AngleQuery: W2 must be positive");
    if (t1 < 0 || t2 < 0) throw std::invalid_argument("AngleQuery: negative t");
    if (t1 > (1.0 - model.P1) * model.n1 + 1e-9 || t2 > (1.0 - model.P2) * model.n2 + 1e-9)
      throw std::invalid_argument("AngleQuery: t out of summation range");
    if (k < 0 || k + t1 + t2 > model.n)
      throw std::invalid_argument("AngleQuery: l = k+t1+t2 exceeds n");
  }

  // class-1 share of the support: nominally n1*P1 of the k entries
  int k1() const {
    int v = static_cast<int>(std::lround(model.n1 * model.P1));
    v = std::min(v, std::min(k, model.n1));
    v = std::max(v, k - model.n2);
    return std::max(v, 0);
  }
  int k2() const { return k - k1(); }
  // weight energy on the support and on the support-plus-face index set
  double omega() const { return k1() + k2() * W2 * W2; }
  double omega_l() const { return omega() + t1 + t2 * W2 * W2; }
};

namespace detail {

inline double log_erf(double x) { return std::log(std::erf(x)); }

// d/dx log erfcx(x) = 2x - (2/sqrt(pi)) / erfcx(x)
inline double dlog_erfcx(double x) { return 2.0 * x - (2.0 / kSqrtPi) / erfcx(x); }

}  // namespace detail

// log of the external angle of the support face within the weighted
// cross-polytope's face l levels up: after substitution the angle is
//   (xi/sqrt(pi)) * Int_0^inf exp(-xi^2 u^2) erf(u)^{r1} erf(W u)^{r2} du,
// evaluated in the log domain around the integrand peak.
inline double external_angle(const AngleQuery& q, double rel_tol = 1e-8) {
  q.validate();
  const double W = q.W2;
  const double r1 = (1.0 - q.model.P1) * q.model.n1 - q.t1;
  const double r2 = (1.0 - q.model.P2) * q.model.n2 - q.t2;
  if (r1 < -1e-9 || r2 < -1e-9) throw std::invalid_argument("external_angle: negative facet count");
  const double xi2 = q.omega_l();
  if (r1 + r2 <= 1e-12) return -kLn2;  // facet case: the angle is exactly 1/2

  auto logf = [&](double u) {
    double v = -xi2 * u * u;
    if (r1 > 0.0) v += r1 * detail::log_erf(u);
    if (r2 > 0.0) v += r2 * detail::log_erf(W * u);
    return v;
  };
  auto dlogf = [&](double u) {
    double ge = (2.0 / kSqrtPi);
    double v = -2.0 * xi2 * u;
    if (r1 > 0.0) v += r1 * ge * std::exp(-u * u) / std::erf(u);
    if (r2 > 0.0) v += r2 * W * ge * std::exp(-W * W * u * u) / std::erf(W * u);
    return v;
  };

  // the log-integrand is concave with a single interior peak
  double hi = 1.0;
  while (dlogf(hi) > 0.0 && hi < 1e8) hi *= 2.0;
  double lo = 1e-12;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (dlogf(mid) > 0.0 ? lo : hi) = mid;
  }
  const double upeak = 0.5 * (lo + hi);
  const double hpeak = logf(upeak);

  double uhi = std::max(2.0 * upeak, upeak + 1.0);
  while (logf(uhi) > hpeak - 45.0 && uhi < 1e9) uhi *= 1.5;

  auto f = [&](double u) { return std::exp(logf(u) - hpeak); };
  QuadratureResult qr = tanh_sinh(f, 0.0, uhi, rel_tol);
  if (!qr.converged)
    throw QuadratureError("external_angle: quadrature did not reach tolerance");
  return std::log(std::sqrt(xi2) / kSqrtPi) + hpeak + std::log(qr.value);
}

// log of the internal angle between the support face and the face t1+t2
// levels up.  The angle is 2^{-(t1+t2)} * sqrt(pi*omega_l) * p_Z(0) where Z is
// a centered normal minus a weighted sum of half-normals; p_Z(0) is computed
// by saddle-point-tilted inversion of the characteristic function.
inline double internal_angle(const AngleQuery& q, double rel_tol = 1e-8) {
  q.validate();
  if (q.t1 == 0 && q.t2 == 0) return 0.0;  // angle between a face and itself is 1
  const double W = q.W2;
  const double om = q.omega();
  const double t1 = q.t1, t2 = q.t2;
  if (om <= 0.0) throw std::invalid_argument("internal_angle: empty support");

  // cumulant generating function of Z at real s and its derivative
  auto Kp = [&](double s) {
    return om * s / 2.0 + t1 * 0.5 * detail::dlog_erfcx(s / 2.0) +
           t2 * (W / 2.0) * detail::dlog_erfcx(W * s / 2.0);
  };
  double shi = 1.0;
  while (Kp(shi) < 0.0 && shi < 1e8) shi *= 2.0;
  double slo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (slo + shi);
    (Kp(mid) < 0.0 ? slo : shi) = mid;
  }
  const double s = 0.5 * (slo + shi);  // tilt: K'(s) = 0
  const double Ks = om * s * s / 4.0 + t1 * std::log(erfcx(s / 2.0)) +
                    t2 * std::log(erfcx(W * s / 2.0));
  const double lw1 = std::log(erfcx(s / 2.0));
  const double lw2 = std::log(erfcx(W * s / 2.0));

  // contour integral along s + iu; the half-normal factors are Faddeeva
  // functions, the normal factor caps |integrand| by exp(-om u^2/4)
  auto f = [&](double u) {
    std::complex<double> dK(-om * u * u / 4.0, om * s * u / 2.0);
    if (t1 > 0)
      dK += t1 * (std::log(faddeeva_w({-u / 2.0, s / 2.0})) - lw1);
    if (t2 > 0)
      dK += t2 * (std::log(faddeeva_w({-W * u / 2.0, W * s / 2.0})) - lw2);
    return std::exp(dK).real();
  };
  const double U = std::sqrt(168.0 / om);  // tail beyond U is < 1e-18 of the peak
  QuadratureResult qr = tanh_sinh(f, 0.0, U, rel_tol);
  if (!qr.converged)
    throw QuadratureError("internal_angle: quadrature did not reach tolerance");
  if (!(qr.value > 0.0))
    throw QuadratureError("internal_angle: density inversion lost positivity");
  const double log_pz0 = Ks + std::log(qr.value / kPi);

  return -(t1 + t2) * kLn2 + 0.5 * std::log(kPi * q.omega_l()) + log_pz0;
}

// log of one term of the failure-probability union bound:
//   2^{t1+t2} C((1-P1)n1, t1) C((1-P2)n2, t2) beta(t1,t2) gamma(t1,t2)
inline double union_bound_term(const AngleQuery& q, double rel_tol = 1e-8) {
  q.validate();
  const double lb1 = log_binomial((1.0 - q.model.P1) * q.model.n1, q.t1);
  const double lb2 = log_binomial((1.0 - q.model.P2) * q.model.n2, q.t2);
  return (q.t1 + q.t2) * kLn2 + lb1 + lb2 + internal_angle(q, rel_tol) +
         external_angle(q, rel_tol);
}

}  // namespace wl1
