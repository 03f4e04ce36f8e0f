#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace wl1 {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341145183;
inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

// ---------------------------------------------------------------------------
// scaled complementary error function, real argument: erfcx(x) = e^{x^2} erfc(x)
// ---------------------------------------------------------------------------

namespace detail {

// Laplace continued fraction for erfcx; with 100 levels the truncation error
// sits below double rounding for x >= 2
inline double erfcx_cf(double x) {
  // erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  double f = 0.0;
  for (int k = 100; k >= 1; --k) f = (0.5 * k) / (x + f);
  return 1.0 / (kSqrtPi * (x + f));
}

}  // namespace detail

inline double erfcx(double x) {
  if (x < 0.0) {
    // erfcx(-x) = 2 e^{x^2} - erfcx(x); overflows for x < -26.6 like e^{x^2}
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x >= 2.0) return detail::erfcx_cf(x);
  // below 2 the library erfc keeps full precision and e^{x^2} amplifies
  // argument rounding by at most x^2 ulps
  return std::exp(x * x) * std::erfc(x);
}

// log of the standard normal cdf, stable for very negative arguments
inline double log_phi_cdf(double x) {
  // Phi(x) = erfc(-x/sqrt(2))/2 and erfc(t) = e^{-t^2} erfcx(t)
  double t = -x / std::sqrt(2.0);
  if (t <= 0.0) return std::log1p(-0.5 * std::erfc(-t)) ;
  return -t * t + std::log(0.5 * erfcx(t));
}

// Mills-type ratio phi(x)/Phi(x) for the standard normal, stable for x << 0
inline double gauss_pdf_over_cdf(double x) {
  // phi(x)/Phi(x) = sqrt(2/pi) / erfcx(-x/sqrt(2))
  return std::sqrt(2.0 / kPi) / erfcx(-x / std::sqrt(2.0));
}

// ---------------------------------------------------------------------------
// Faddeeva function w(z) = e^{-z^2} erfc(-iz) for Im z >= 0.
//
// Midpoint-free trapezoidal sum over the defining integral
//   w(z) = (i/pi) \int e^{-t^2}/(z-t) dt,
// whose discretization error is O(e^{-pi^2/h^2}) plus an explicitly known
// pole-image correction (Chiarella-Reichel).  With h = 0.4 the truncation
// error is ~1e-27; valid for 0 <= Im z < pi/h.  Above that strip we switch to
// the Laplace continued fraction, which converges fast away from the real axis.
// ---------------------------------------------------------------------------

namespace detail {

inline std::complex<double> faddeeva_cf(std::complex<double> z) {
  std::complex<double> f = 0.0;
  for (int k = 100; k >= 1; --k) f = (0.5 * k) / (z - f);
  return std::complex<double>(0.0, 1.0 / kSqrtPi) / (z - f);
}

inline std::complex<double> faddeeva_trap(std::complex<double> z) {
  constexpr double h = 0.4;
  constexpr int N = 17;  // e^{-(Nh)^2} = e^{-46} below double eps relative to the sum
  std::complex<double> sum = 0.0;
  for (int k = -N; k <= N; ++k) {
    double t = k * h;
    sum += std::exp(-t * t) / (z - t);
  }
  std::complex<double> w = std::complex<double>(0.0, h / kPi) * sum;
  // pole-image correction: + 2 e^{-z^2} / (1 - e^{-2 pi i z / h})
  std::complex<double> em = std::exp(std::complex<double>(0.0, -2.0 * kPi / h) * z);
  w += 2.0 * std::exp(-z * z) / (1.0 - em);
  return w;
}

}  // namespace detail

inline std::complex<double> faddeeva_w(std::complex<double> z) {
  if (z.imag() < 0.0) throw std::domain_error("faddeeva_w: Im z must be >= 0");
  if (z.imag() >= 7.0) return detail::faddeeva_cf(z);  // outside the trapezoid strip
  return detail::faddeeva_trap(z);
}

// ---------------------------------------------------------------------------
// combinatorics (real-argument binomials via lgamma) and entropy
// ---------------------------------------------------------------------------

inline double log_binomial(double n, double k) {
  if (k < 0.0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0.0 || k == n) return 0.0;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// natural-log binary entropy, H(0) = H(1) = 0
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

}  // namespace wl1
