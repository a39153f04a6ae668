#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chimap/errors.hpp"
#include "chimap/lightcone.hpp"
#include "chimap/trajectory.hpp"

namespace chimap {

/// The regular-explosion protocol: the stationary observer fires a short
/// light pulse from x = 0 every dt_a, starting at t = dt_a (the pulse at the
/// shared origin is excluded). Signals chase the moving observer, so the
/// protocol is defined for s = +1.
struct ScenarioConfig {
  Trajectory traj;
  double dt_a{};
  std::size_t count{};
  Direction s{Direction::plus_x};

  void validate() const {
    if (!std::isfinite(dt_a) || !(dt_a > 0.0))
      throw domain_error("emission interval dt_a must be finite and > 0");
    if (count < 1) throw domain_error("scenario needs at least one pulse");
    if (s != Direction::plus_x)
      throw domain_error(
          "the signalling protocol is defined for s = +1 (pulses sent after "
          "the moving observer)");
  }
};

/// One emission/arrival pair in both frames. chi_a = -t_a_emit (emission from
/// x = 0) and t_b_arrive = -chi_b (arrival at the moving observer's origin).
struct EventRecord {
  std::size_t n{};
  double t_a_emit{};
  double t_a_arrive{};
  double x_a_arrive{};
  double chi_a{};
  double chi_b{};
  double t_b_arrive{};
};

inline std::vector<EventRecord> run_scenario(const ScenarioConfig& cfg,
                                             const QuadratureConfig& quad = {}) {
  cfg.validate();
  FrameMap fm(cfg.traj, cfg.s, quad);
  std::vector<EventRecord> records;
  records.reserve(cfg.count);
  for (std::size_t n = 1; n <= cfg.count; ++n) {
    const double t_emit = static_cast<double>(n) * cfg.dt_a;
    const double chi_a = -t_emit;
    Event arrival;
    try {
      arrival = cfg.traj.light_intersection({chi_a, cfg.s});
    } catch (const no_intersection& e) {
      throw no_intersection("pulse n = " + std::to_string(n) +
                            " never reaches the moving observer: " + e.what());
    } catch (const domain_error& e) {
      throw domain_error("pulse n = " + std::to_string(n) + ": " + e.what());
    }
    const double chi_b = fm.map(chi_a);
    records.push_back(EventRecord{n, t_emit, arrival.t, arrival.x, chi_a,
                                  chi_b, -chi_b});
  }
  return records;
}

/// Successive differences of the arrival times in the moving frame.
inline std::vector<double> arrival_intervals(
    std::span<const EventRecord> records) {
  if (records.size() < 2)
    throw domain_error("arrival intervals need at least two records");
  std::vector<double> intervals;
  intervals.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i)
    intervals.push_back(records[i].t_b_arrive - records[i - 1].t_b_arrive);
  return intervals;
}

/// A sample of the stationary observer's worldline as seen from the moving
/// frame.
struct BobFrameSample {
  double t_b{};
  double mu_b{};
};

/// Reconstruct the stationary observer's worldline in the moving frame from
/// the per-pulse relations, accumulated from the shared origin. Each gap
/// between successive light lines is treated as one inertial segment whose
/// Doppler ratio kappa_n = dchi_B/dchi_A fixes the segment's velocity and
/// Lorentz factor; the emission clock then advances by gamma_n * dt_a and
/// the source shifts by dchi_B + c dt (so the sampled slope is exactly the
/// segment's -beta).
inline std::vector<BobFrameSample> bob_frame_trajectory(
    const ScenarioConfig& cfg, const QuadratureConfig& quad = {}) {
  const std::vector<EventRecord> records = run_scenario(cfg, quad);
  std::vector<BobFrameSample> samples;
  samples.reserve(records.size() + 1);
  samples.push_back({0.0, 0.0});
  double t_b = 0.0;
  double mu_b = 0.0;
  double prev_chi_b = 0.0;
  for (const EventRecord& rec : records) {
    const double dchi_b = rec.chi_b - prev_chi_b;
    const double kappa_n = -dchi_b / cfg.dt_a;  // dchi_A = -c dt_a
    const double gamma_n = (1.0 + kappa_n * kappa_n) / (2.0 * kappa_n);
    const double dt_b_emit = gamma_n * cfg.dt_a;
    t_b += dt_b_emit;
    mu_b += dchi_b + dt_b_emit;
    samples.push_back({t_b, mu_b});
    prev_chi_b = rec.chi_b;
  }
  return samples;
}

}  // namespace chimap
