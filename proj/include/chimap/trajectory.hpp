#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chimap/detail/rootfind.hpp"
#include "chimap/errors.hpp"

namespace chimap {

/// Dimensionless velocity fraction v/c, strictly inside (-1, 1).
class Beta {
 public:
  explicit Beta(double value) : value_(value) {
    if (!std::isfinite(value) || std::abs(value) >= 1.0)
      throw domain_error("beta must satisfy |v/c| < 1, got " +
                         std::to_string(value));
  }
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Propagation direction of light along the x axis.
enum class Direction : int { plus_x = +1, minus_x = -1 };

inline constexpr double direction_sign(Direction s) noexcept {
  return static_cast<double>(static_cast<int>(s));
}

inline Direction direction_from_int(int s) {
  if (s == 1) return Direction::plus_x;
  if (s == -1) return Direction::minus_x;
  throw domain_error("direction must be +1 or -1, got " + std::to_string(s));
}

/// Label of a light-like worldline, chi = x - s*c*t. chi is constant along
/// the worldline and s is the same in every frame.
struct NaturalCoordinate {
  double chi{};
  Direction s{Direction::plus_x};
};

/// A point of the stationary frame's spacetime diagram (c = 1 units).
struct Event {
  double t{};
  double x{};
};

namespace detail {

// Velocities produced by internal formulas are subluminal by construction;
// if the double still rounds onto |v| = 1 the run has left representable
// territory (e.g. asymptotically close to a horizon).
inline Beta subluminal(double v) {
  if (!std::isfinite(v) || std::abs(v) >= 1.0)
    throw tolerance_not_met(
        "velocity is within roundoff of the speed of light; the requested "
        "point is too close to the trajectory's asymptote for double "
        "precision");
  return Beta(v);
}

}  // namespace detail

struct ConstantVelocity {
  Beta beta;
};

/// Interior switch times (all > 0, strictly increasing) and one velocity per
/// segment; segment k spans [t_{k-1}, t_k) with t_{-1} = 0, so betas has one
/// more entry than breakpoints. At a switch time the new velocity applies.
struct PiecewiseConstantVelocity {
  std::vector<double> breakpoints;
  std::vector<Beta> betas;
};

/// Worldline of constant proper acceleration a > 0 (units c^2/length),
/// starting at rest at the origin: mu(t) = (1/a)(sqrt(1 + (a t)^2) - 1).
struct UniformProperAcceleration {
  double accel{};
};

/// Piecewise-linear worldline through sampled (t, x) points on [0, t_max].
struct SampledWorldline {
  std::vector<double> times;
  std::vector<double> positions;
};

/// The moving observer's time-like worldline in the stationary frame,
/// passing through the shared origin at t = 0. All queries use c = 1.
class Trajectory {
 public:
  static Trajectory constant(Beta beta) {
    Trajectory t{ConstantVelocity{beta}};
    if (beta.value() < 0.0) t.add_negative_velocity_warning();
    return t;
  }

  static Trajectory piecewise(std::vector<double> breakpoints,
                              std::vector<Beta> betas) {
    if (betas.empty())
      throw domain_error("piecewise trajectory needs at least one segment");
    if (betas.size() != breakpoints.size() + 1)
      throw domain_error(
          "piecewise trajectory needs one velocity per segment "
          "(breakpoints.size() + 1)");
    double prev = 0.0;
    for (double b : breakpoints) {
      if (!std::isfinite(b) || b <= prev)
        throw domain_error(
            "piecewise breakpoints must be finite, positive and strictly "
            "increasing");
      prev = b;
    }
    Trajectory t{PiecewiseConstantVelocity{std::move(breakpoints),
                                           std::move(betas)}};
    t.validate_single_departure();
    const auto& pw = std::get<PiecewiseConstantVelocity>(t.family_);
    for (const Beta& b : pw.betas)
      if (b.value() < 0.0) {
        t.add_negative_velocity_warning();
        break;
      }
    return t;
  }

  static Trajectory uniform_acceleration(double accel) {
    if (!std::isfinite(accel) || accel <= 0.0)
      throw domain_error("proper acceleration must be finite and > 0");
    return Trajectory{UniformProperAcceleration{accel}};
  }

  static Trajectory sampled(std::vector<double> times,
                            std::vector<double> positions) {
    if (times.size() < 2 || times.size() != positions.size())
      throw domain_error("sampled trajectory needs >= 2 (t, x) points");
    if (times.front() != 0.0 || positions.front() != 0.0)
      throw domain_error("sampled trajectory must start at (t, x) = (0, 0)");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || !std::isfinite(positions[i]) ||
          times[i] <= times[i - 1])
        throw domain_error("sampled times must be finite, strictly increasing");
      const double slope =
          (positions[i] - positions[i - 1]) / (times[i] - times[i - 1]);
      if (!(std::abs(slope) < 1.0))
        throw domain_error(
            "sampled trajectory segment " + std::to_string(i - 1) +
            " is not time-like (|dx/dt| = " + std::to_string(slope) + ")");
    }
    Trajectory t{SampledWorldline{std::move(times), std::move(positions)}};
    t.validate_single_departure();
    const auto& sw = std::get<SampledWorldline>(t.family_);
    for (std::size_t i = 1; i < sw.times.size(); ++i)
      if (sw.positions[i] < sw.positions[i - 1]) {
        t.add_negative_velocity_warning();
        break;
      }
    return t;
  }

  /// mu(t) for t >= 0 (and t <= t_max for sampled worldlines).
  double position_at(double t) const {
    require_in_domain(t);
    return std::visit(
        [&](const auto& f) { return position_impl(f, t); }, family_);
  }

  /// v(t)/c; at a velocity switch, the value after the switch.
  Beta velocity_at(double t) const {
    require_in_domain(t);
    return std::visit(
        [&](const auto& f) { return velocity_impl(f, t); }, family_);
  }

  /// The unique t >= 0 event where the light line x = chi + s*t crosses the
  /// worldline. A time-like curve crosses each light line at most once.
  Event light_intersection(NaturalCoordinate line) const {
    const double t = crossing_time(line);
    return Event{t, position_at(t)};
  }

  /// Velocity at the light-line crossing event.
  Beta beta_at_chi(NaturalCoordinate line) const {
    return velocity_at(crossing_time(line));
  }

  /// Velocity seen on a light line for frame-map purposes. A constant
  /// velocity worldline is an eternal inertial line, so every chi answers;
  /// time-anchored families answer only on lines crossed at t >= 0.
  Beta velocity_on_line(NaturalCoordinate line) const {
    if (auto b = uniform_velocity()) return *b;
    return beta_at_chi(line);
  }

  /// Engaged when the worldline is a single inertial line.
  std::optional<Beta> uniform_velocity() const {
    if (const auto* cv = std::get_if<ConstantVelocity>(&family_))
      return cv->beta;
    return std::nullopt;
  }

  /// End of the time domain: t_max for sampled worldlines, +inf otherwise.
  double domain_end() const {
    if (const auto* sw = std::get_if<SampledWorldline>(&family_))
      return sw->times.back();
    return std::numeric_limits<double>::infinity();
  }

  /// Times at which the velocity is discontinuous or kinked.
  std::vector<double> velocity_breakpoints() const {
    if (const auto* pw = std::get_if<PiecewiseConstantVelocity>(&family_))
      return pw->breakpoints;
    if (const auto* sw = std::get_if<SampledWorldline>(&family_))
      return {sw->times.begin() + 1, sw->times.end() - 1};
    return {};
  }

  /// Closure of the chi values whose light lines are crossed at t >= 0.
  /// For s = +1 this is [lo, 0] with lo the horizon (-1/a, open, for uniform
  /// acceleration), the sampled end-point image, or -inf; mirrored for
  /// s = -1. chi = 0 is always crossed (shared origin).
  std::pair<double, double> crossed_chi_range(Direction s) const {
    const double inf = std::numeric_limits<double>::infinity();
    double extreme;  // chi image of the far end of the time domain
    if (const auto* ua = std::get_if<UniformProperAcceleration>(&family_)) {
      extreme = (s == Direction::plus_x) ? -1.0 / ua->accel : inf;
    } else if (const auto* sw = std::get_if<SampledWorldline>(&family_)) {
      extreme = sw->positions.back() - direction_sign(s) * sw->times.back();
    } else {
      extreme = (s == Direction::plus_x) ? -inf : inf;
    }
    return (s == Direction::plus_x) ? std::make_pair(extreme, 0.0)
                                    : std::make_pair(0.0, extreme);
  }

  /// True when the lower/upper end of crossed_chi_range is an asymptote that
  /// is never attained (uniform acceleration running from a light line).
  bool range_end_is_asymptotic(Direction s) const {
    return std::holds_alternative<UniformProperAcceleration>(family_) &&
           s == Direction::plus_x;
  }

  /// Load-time notes (currently: negative velocities, which the frame-map
  /// relations are not stated for).
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  using Family = std::variant<ConstantVelocity, PiecewiseConstantVelocity,
                              UniformProperAcceleration, SampledWorldline>;

  explicit Trajectory(Family f) : family_(std::move(f)) {}

  void add_negative_velocity_warning() {
    warnings_.push_back(
        "trajectory has negative velocity somewhere; the frame-map relations "
        "are stated for an observer receding from the origin");
  }

  void require_in_domain(double t) const {
    if (!std::isfinite(t) || t < 0.0)
      throw domain_error("time must be finite and >= 0, got " +
                         std::to_string(t));
    if (t > domain_end())
      throw domain_error("time " + std::to_string(t) +
                         " is beyond the sampled trajectory's range");
  }

  // --- per-family position/velocity -------------------------------------

  static double position_impl(const ConstantVelocity& f, double t) {
    return f.beta.value() * t;
  }
  static Beta velocity_impl(const ConstantVelocity& f, double) {
    return f.beta;
  }

  std::size_t piecewise_segment(const PiecewiseConstantVelocity& f,
                                double t) const {
    return static_cast<std::size_t>(
        std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), t) -
        f.breakpoints.begin());
  }
  double position_impl(const PiecewiseConstantVelocity& f, double t) const {
    ensure_piecewise_nodes(f);
    const std::size_t k = piecewise_segment(f, t);
    const double t0 = (k == 0) ? 0.0 : f.breakpoints[k - 1];
    return node_positions_[k] + f.betas[k].value() * (t - t0);
  }
  Beta velocity_impl(const PiecewiseConstantVelocity& f, double t) const {
    return f.betas[piecewise_segment(f, t)];
  }

  static double position_impl(const UniformProperAcceleration& f, double t) {
    const double r = f.accel * t;
    // sqrt(1+r^2)-1 without cancellation for small r
    return (r * r / (1.0 + std::hypot(1.0, r))) / f.accel;
  }
  static Beta velocity_impl(const UniformProperAcceleration& f, double t) {
    const double r = f.accel * t;
    return detail::subluminal(r / std::hypot(1.0, r));
  }

  static std::size_t sampled_segment(const SampledWorldline& f, double t) {
    // right-limit convention at nodes; last segment covers t = t_max
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(f.times.begin(), f.times.end(), t) -
        f.times.begin());
    if (k == 0) k = 1;
    if (k >= f.times.size()) k = f.times.size() - 1;
    return k;
  }
  static double position_impl(const SampledWorldline& f, double t) {
    const std::size_t k = sampled_segment(f, t);
    const double w = (t - f.times[k - 1]) / (f.times[k] - f.times[k - 1]);
    return f.positions[k - 1] + w * (f.positions[k] - f.positions[k - 1]);
  }
  static Beta velocity_impl(const SampledWorldline& f, double t) {
    const std::size_t k = sampled_segment(f, t);
    return detail::subluminal((f.positions[k] - f.positions[k - 1]) /
                              (f.times[k] - f.times[k - 1]));
  }

  void ensure_piecewise_nodes(const PiecewiseConstantVelocity& f) const {
    if (!node_positions_.empty()) return;
    node_positions_.resize(f.breakpoints.size() + 1);
    node_positions_[0] = 0.0;
    double prev_t = 0.0;
    for (std::size_t k = 0; k < f.breakpoints.size(); ++k) {
      node_positions_[k + 1] =
          node_positions_[k] + f.betas[k].value() * (f.breakpoints[k] - prev_t);
      prev_t = f.breakpoints[k];
    }
  }

  // --- light-line crossing ----------------------------------------------

  double crossing_time(NaturalCoordinate line) const {
    const double chi = line.chi;
    const double s = direction_sign(line.s);
    if (!std::isfinite(chi))
      throw domain_error("natural coordinate must be finite");
    if (chi == 0.0) return 0.0;
    if (s * chi > 0.0)
      throw no_intersection(
          "light line chi = " + std::to_string(chi) +
          " passed the origin before the observers met (no crossing for "
          "t >= 0)");

    const auto [range_lo, range_hi] = crossed_chi_range(line.s);
    if (range_end_is_asymptotic(line.s)) {
      // run-from-light horizon: the crossing time diverges at range_lo
      if (chi <= range_lo)
        throw no_intersection(
            "light line chi = " + std::to_string(chi) +
            " is never reached: the accelerating worldline outruns every "
            "light line with chi <= " + std::to_string(range_lo));
    }

    // g(t) = mu(t) - chi - s*t is strictly monotone (|v| < 1); bracket by
    // doubling, then bisection/secant.
    const auto g = [&](double t) { return position_at(t) - chi - s * t; };
    const double g0 = -chi;  // mu(0) = 0
    const double t_end = domain_end();
    double lo = 0.0, g_lo = g0;
    double hi = 1.0;
    if (std::isfinite(t_end)) hi = std::min(hi, t_end);
    for (int i = 0;; ++i) {
      const double g_hi = g(hi);
      if ((g_hi > 0.0) != (g0 > 0.0) || g_hi == 0.0)
        return detail::solve_bracketed(g, lo, hi, g_lo, g_hi);
      if (hi >= t_end)
        throw domain_error(
            "light line chi = " + std::to_string(chi) +
            " crosses the worldline beyond the sampled trajectory's range");
      if (i > 1100 || hi > 1e306)
        throw tolerance_not_met(
            "crossing-time bracket search ran away; trajectory is too close "
            "to light-like for chi = " + std::to_string(chi));
      lo = hi;
      g_lo = g_hi;
      hi = std::min(hi * 2.0, t_end);
    }
  }

  Family family_;
  std::vector<std::string> warnings_;
  mutable std::vector<double> node_positions_;  // piecewise node cache

  // A worldline may leave the origin observer's position x = 0 once and must
  // not return or cross it afterwards.
  void validate_single_departure() {
    const auto reject = [] {
      throw domain_error(
          "trajectory returns to (or crosses) the origin observer's "
          "worldline x = 0 after departing");
    };
    if (const auto* pw = std::get_if<PiecewiseConstantVelocity>(&family_)) {
      ensure_piecewise_nodes(*pw);
      double side = 0.0;
      for (std::size_t k = 1; k < node_positions_.size(); ++k) {
        const double x = node_positions_[k];
        if (side == 0.0) {
          if (x != 0.0) side = (x > 0.0) ? 1.0 : -1.0;
        } else if (x == 0.0 || x * side < 0.0) {
          reject();
        }
      }
      const double last_beta = pw->betas.back().value();
      if (side != 0.0 && last_beta * side < 0.0) reject();  // heads back
    } else if (const auto* sw = std::get_if<SampledWorldline>(&family_)) {
      double side = 0.0;
      for (std::size_t i = 1; i < sw->positions.size(); ++i) {
        const double x = sw->positions[i];
        if (side == 0.0) {
          if (x != 0.0) side = (x > 0.0) ? 1.0 : -1.0;
        } else if (x == 0.0 || x * side < 0.0) {
          reject();
        }
      }
    }
  }
};

}  // namespace chimap
