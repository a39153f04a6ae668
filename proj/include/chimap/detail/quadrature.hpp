#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "chimap/errors.hpp"

namespace chimap::detail {

// Gauss-Kronrod 7-15 pair on [-1, 1]; odd-index Kronrod abscissae are the
// embedded Gauss-7 nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct QuadPanel {
  double lo{};
  double hi{};
  double value{};
  double error{};
};

template <class F>
QuadPanel evaluate_panel(F&& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = f(center);
  double kronrod = kKronrodWeights[7] * f_center;
  double gauss = kGaussWeights[3] * f_center;
  for (int j = 0; j < 7; ++j) {
    const double fa = f(center - half * kKronrodNodes[j]);
    const double fb = f(center + half * kKronrodNodes[j]);
    kronrod += kKronrodWeights[j] * (fa + fb);
    if (j % 2 == 1) gauss += kGaussWeights[(j - 1) / 2] * (fa + fb);
  }
  QuadPanel panel;
  panel.lo = lo;
  panel.hi = hi;
  panel.value = half * kronrod;
  panel.error = std::abs(half * (kronrod - gauss));
  return panel;
}

// Globally adaptive integration of f over [lo, hi], lo < hi. The worst panel
// is bisected until the summed error estimate meets max(abs_tol,
// rel_tol*|value|). interior_splits (sorted ascending) seeds panel edges at
// known integrand kinks.
template <class F>
double integrate_adaptive(F&& f, double lo, double hi, double abs_tol,
                          double rel_tol, std::size_t max_subdivisions,
                          std::span<const double> interior_splits = {}) {
  if (lo == hi) return 0.0;
  if (!(lo < hi)) throw domain_error("integrate_adaptive: lo must be < hi");

  const auto worse = [](const QuadPanel& a, const QuadPanel& b) {
    return a.error < b.error;
  };
  std::priority_queue<QuadPanel, std::vector<QuadPanel>, decltype(worse)> heap(
      worse);

  double total_value = 0.0;
  double total_error = 0.0;
  double prev = lo;
  for (double split : interior_splits) {
    if (!(split > prev && split < hi)) continue;
    QuadPanel p = evaluate_panel(f, prev, split);
    total_value += p.value;
    total_error += p.error;
    heap.push(p);
    prev = split;
  }
  {
    QuadPanel p = evaluate_panel(f, prev, hi);
    total_value += p.value;
    total_error += p.error;
    heap.push(p);
  }

  std::size_t subdivisions = 0;
  while (total_error > std::max(abs_tol, rel_tol * std::abs(total_value))) {
    if (++subdivisions > max_subdivisions)
      throw tolerance_not_met(
          "integrate_adaptive: subdivision budget exhausted before the "
          "requested tolerance was reached");
    QuadPanel worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi))
      throw tolerance_not_met(
          "integrate_adaptive: panel width underflow before the requested "
          "tolerance was reached");
    heap.pop();
    QuadPanel left = evaluate_panel(f, worst.lo, mid);
    QuadPanel right = evaluate_panel(f, mid, worst.hi);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  return total_value;
}

}  // namespace chimap::detail
