// asymptotic picture: recoverable-P1 threshold as the class-2 weight grows
#include <cstdio>

#include "wl1/exponents.hpp"

int main() {
  const double delta = 0.75, P2 = 0.1, g1 = 0.5, g2 = 0.5;
  wl1::ExponentGridOptions opts;
  opts.grid_n = 120;  // coarser grid keeps the demo quick
  opts.keep_surface = false;
  std::printf("delta = %.2f, P2 = %.2f, gamma1 = gamma2 = 0.5\n", delta, P2);
  for (double w2 : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    double th = wl1::threshold_P1(delta, P2, g1, g2, w2, 1e-3, 0.0, opts);
    std::printf("W2 = %.1f: recoverable P1 threshold = %.3f\n", w2, th);
  }
  return 0;
}
