#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chimap/detail/quadrature.hpp"
#include "chimap/errors.hpp"
#include "chimap/trajectory.hpp"

namespace chimap {

/// Tolerances and budget for the adaptive frame-map quadrature.
struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  std::size_t max_subdivisions = 1000000;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1)
      throw domain_error(
          "quadrature config requires abs_tol > 0, rel_tol > 0, "
          "max_subdivisions >= 1");
  }
};

/// Lorentz factor (1 - beta^2)^{-1/2}.
inline double lorentz_gamma(Beta beta) {
  const double b = beta.value();
  return 1.0 / std::sqrt((1.0 - b) * (1.0 + b));
}

/// Doppler factor gamma*(1 + s*beta) = sqrt((1+s*beta)/(1-s*beta)): the
/// ratio of corresponding natural-coordinate intervals between the moving
/// and the stationary frame. Always > 0; equals 1 iff beta = 0.
inline double doppler_factor(Beta beta, Direction s) {
  const double sb = direction_sign(s) * beta.value();
  return std::sqrt((1.0 + sb) / (1.0 - sb));
}

/// Natural-coordinate map between two inertial observers: chi_B =
/// gamma*(1 + s*beta)*chi_A, linear and origin-preserving, same s.
inline NaturalCoordinate inertial_map(NaturalCoordinate chi_a, Beta beta) {
  return {doppler_factor(beta, chi_a.s) * chi_a.chi, chi_a.s};
}

/// The monotone natural-coordinate map chi_A -> chi_B induced by a moving
/// observer's worldline, for one propagation direction. chi_B is the
/// integral over [0, chi_A] of the local Doppler factor, so the map is
/// strictly increasing and fixes the origin.
class FrameMap {
 public:
  FrameMap(Trajectory traj, Direction s, QuadratureConfig quad = {})
      : traj_(std::move(traj)), s_(s), quad_(quad) {
    quad_.validate();
    for (double t : traj_.velocity_breakpoints())
      split_chis_.push_back(traj_.position_at(t) - direction_sign(s_) * t);
    std::sort(split_chis_.begin(), split_chis_.end());
    split_chis_.erase(std::unique(split_chis_.begin(), split_chis_.end()),
                      split_chis_.end());
  }

  const Trajectory& trajectory() const { return traj_; }
  Direction direction() const { return s_; }
  const QuadratureConfig& quadrature() const { return quad_; }

  /// chi_A interval on which the map is defined. An eternal inertial
  /// worldline answers everywhere; time-anchored worldlines only on light
  /// lines they cross at t >= 0 (the lower end is an open asymptote for a
  /// uniformly accelerating observer, s = +1).
  std::pair<double, double> domain() const {
    const double inf = std::numeric_limits<double>::infinity();
    if (traj_.uniform_velocity()) return {-inf, inf};
    return traj_.crossed_chi_range(s_);
  }

  /// Local velocity entering the map's integrand at chi_A.
  Beta beta_at(double chi_a) const {
    return traj_.velocity_on_line({chi_a, s_});
  }

  /// d chi_B / d chi_A: the local Doppler factor at chi_A.
  double jacobian_at(double chi_a) const { return doppler_factor_at(chi_a); }

  /// chi_B for a given chi_A. Exact 0 -> 0 without quadrature.
  double map(double chi_a) const { return map_increment(0.0, chi_a); }

  /// Signed integral of the local Doppler factor over [from, to].
  double map_increment(double from, double to) const {
    if (!std::isfinite(from) || !std::isfinite(to))
      throw domain_error("natural coordinate must be finite");
    if (from == to) return 0.0;
    const double lo = std::min(from, to);
    const double hi = std::max(from, to);
    const double value = detail::integrate_adaptive(
        [this](double chi) { return doppler_factor_at(chi); }, lo, hi,
        quad_.abs_tol, quad_.rel_tol, quad_.max_subdivisions, split_chis_);
    return (to > from) ? value : -value;
  }

  /// chi_A whose image is chi_B, located by geometric bracket expansion from
  /// the inertial estimate and refined until |map(chi_A) - chi_B| <= abs_tol.
  double inverse(double chi_b) const {
    if (!std::isfinite(chi_b))
      throw domain_error("natural coordinate must be finite");
    if (chi_b == 0.0) return 0.0;

    const double k0 = doppler_factor(beta_at(0.0), s_);
    const auto residual = [&](double chi_a) { return map(chi_a) - chi_b; };

    const auto [dom_lo, dom_hi] = domain();
    double near = 0.0, r_near = -chi_b;  // residual at the origin side
    double far;
    if (chi_b > 0.0) {
      if (!(dom_hi > 0.0))
        throw out_of_range("chi_B = " + std::to_string(chi_b) +
                           " is outside the image of the map (image <= 0 for "
                           "this trajectory and direction)");
      far = std::min(std::max(chi_b / k0, 1e-3), dom_hi);
      for (int i = 0;; ++i) {
        const double r_far = residual(far);
        if (r_far >= 0.0)
          return refine_inverse(residual, near, far, r_near, r_far);
        if (far >= dom_hi)
          throw out_of_range("chi_B = " + std::to_string(chi_b) +
                             " is beyond the image of the sampled domain");
        if (i > 300)
          throw tolerance_not_met("inverse bracket expansion did not close");
        near = far;
        r_near = r_far;
        far = std::min(far * 2.0, dom_hi);
      }
    } else {
      if (!(dom_lo < 0.0))
        throw out_of_range("chi_B = " + std::to_string(chi_b) +
                           " is outside the image of the map (image >= 0 for "
                           "this trajectory and direction)");
      const bool open_lo = traj_.range_end_is_asymptotic(s_);
      far = std::min(chi_b / k0, -1e-3);
      if (std::isfinite(dom_lo))
        far = open_lo ? std::max(far, 0.5 * dom_lo) : std::max(far, dom_lo);
      for (int i = 0;; ++i) {
        const double r_far = residual(far);
        if (r_far <= 0.0)
          return refine_inverse(residual, far, near, r_far, r_near);
        if (!open_lo && far <= dom_lo)
          throw out_of_range("chi_B = " + std::to_string(chi_b) +
                             " is beyond the image of the sampled domain");
        if (i > 300)
          throw tolerance_not_met("inverse bracket expansion did not close");
        near = far;
        r_near = r_far;
        if (!std::isfinite(dom_lo)) {
          far *= 2.0;
        } else if (open_lo) {
          far = dom_lo + 0.5 * (far - dom_lo);  // approach the asymptote
        } else {
          far = std::max(far * 2.0, dom_lo);
        }
      }
    }
  }

  /// Riemann accumulation of the map over `segments` equal chi_A steps,
  /// evaluating the Doppler factor at each step's far edge. Converges to
  /// map(chi_A) from first order as segments grows.
  double discretized(double chi_a, std::size_t segments) const {
    if (segments < 1)
      throw domain_error("discretized map needs at least one segment");
    if (!std::isfinite(chi_a))
      throw domain_error("natural coordinate must be finite");
    if (chi_a == 0.0) return 0.0;
    const double step = chi_a / static_cast<double>(segments);
    double sum = 0.0;
    for (std::size_t n = 1; n <= segments; ++n) {
      const double node =
          chi_a * (static_cast<double>(n) / static_cast<double>(segments));
      sum += doppler_factor_at(node) * step;
    }
    return sum;
  }

 private:
  double doppler_factor_at(double chi_a) const {
    const double k = doppler_factor(beta_at(chi_a), s_);
    if (k > 1e12)
      throw tolerance_not_met(
          "local Doppler factor exceeds 1e12 at chi_A = " +
          std::to_string(chi_a) + "; too close to the trajectory's asymptote");
    return k;
  }

  template <class F>
  double refine_inverse(F&& residual, double lo, double hi, double r_lo,
                        double r_hi) const {
    // residual(lo) <= 0 <= residual(hi); success is the residual contract,
    // not the bracket width.
    if (std::abs(r_lo) <= quad_.abs_tol) return lo;
    if (std::abs(r_hi) <= quad_.abs_tol) return hi;
    for (int i = 0; i < 200; ++i) {
      const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale)
        throw tolerance_not_met(
            "inverse map: bracket narrowed to machine width with residual "
            "still above abs_tol = " + std::to_string(quad_.abs_tol));
      double x = hi - r_hi * (hi - lo) / (r_hi - r_lo);
      if (i % 2 == 1 || !std::isfinite(x) || !(x > lo && x < hi))
        x = 0.5 * (lo + hi);
      const double rx = residual(x);
      if (std::abs(rx) <= quad_.abs_tol) return x;
      if (rx < 0.0) {
        lo = x;
        r_lo = rx;
      } else {
        hi = x;
        r_hi = rx;
      }
    }
    throw tolerance_not_met("inverse map: iteration budget exhausted");
  }

  Trajectory traj_;
  Direction s_;
  QuadratureConfig quad_;
  std::vector<double> split_chis_;
};

// Contract-named wrappers over the FrameMap methods. Each checks that the
// coordinate's propagation direction matches the map's.

inline void require_same_direction(const FrameMap& fm, NaturalCoordinate nc) {
  if (nc.s != fm.direction())
    throw domain_error(
        "natural coordinate's propagation direction does not match the "
        "frame map's");
}

inline NaturalCoordinate general_map(const FrameMap& fm,
                                     NaturalCoordinate chi_a) {
  require_same_direction(fm, chi_a);
  return {fm.map(chi_a.chi), chi_a.s};
}

inline double jacobian(const FrameMap& fm, NaturalCoordinate chi_a) {
  require_same_direction(fm, chi_a);
  return fm.jacobian_at(chi_a.chi);
}

inline NaturalCoordinate inverse_map(const FrameMap& fm,
                                     NaturalCoordinate chi_b) {
  require_same_direction(fm, chi_b);
  return {fm.inverse(chi_b.chi), chi_b.s};
}

inline NaturalCoordinate discretized_map(const FrameMap& fm,
                                         NaturalCoordinate chi_a,
                                         std::size_t segments) {
  require_same_direction(fm, chi_a);
  return {fm.discretized(chi_a.chi, segments), chi_a.s};
}

}  // namespace chimap
