#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "chimap/errors.hpp"

namespace chimap::detail {

// Root of f on a sign-changing bracket [lo, hi], bisection sharpened by
// secant steps. Every other step is a forced midpoint, so the bracket width
// at least halves per two iterations.
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double f_lo, double f_hi,
                       int max_iter = 200) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw domain_error("solve_bracketed: endpoints do not bracket a root");
  for (int i = 0; i < max_iter; ++i) {
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
      return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
    double x = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (i % 2 == 1 || !std::isfinite(x) || !(x > lo && x < hi))
      x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (f_lo > 0.0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
      f_hi = fx;
    }
  }
  throw tolerance_not_met("solve_bracketed: iteration budget exhausted");
}

}  // namespace chimap::detail
