#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chimap/errors.hpp"
#include "chimap/lightcone.hpp"
#include "chimap/trajectory.hpp"

namespace chimap {

enum class Polarization { H, V };

/// Mode labels of a local light excitation. Both are invariant under frame
/// transformations; the polarization is a passive two-valued label.
struct BlipMode {
  Direction s{Direction::plus_x};
  Polarization lambda{Polarization::H};

  friend bool operator==(const BlipMode&, const BlipMode&) = default;
};

/// Strictly increasing chi sample points, n >= 2. Grids built by uniform()
/// remember their spacing; grids from arbitrary points are non-uniform.
class ChiGrid {
 public:
  static ChiGrid uniform(double chi_min, double chi_max, std::size_t n_points) {
    if (!(n_points >= 2))
      throw domain_error("chi grid needs at least two points");
    if (!std::isfinite(chi_min) || !std::isfinite(chi_max) ||
        !(chi_min < chi_max))
      throw domain_error("chi grid needs finite chi_min < chi_max");
    std::vector<double> pts(n_points);
    const double span = chi_max - chi_min;
    for (std::size_t i = 0; i < n_points; ++i)
      pts[i] = chi_min + span * (static_cast<double>(i) /
                                 static_cast<double>(n_points - 1));
    pts.back() = chi_max;
    ChiGrid g(std::move(pts));
    g.spacing_ = span / static_cast<double>(n_points - 1);
    return g;
  }

  static ChiGrid from_points(std::vector<double> pts) {
    return ChiGrid(std::move(pts));
  }

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  bool is_uniform() const { return spacing_.has_value(); }
  double spacing() const {
    if (!spacing_) throw domain_error("grid is not uniform");
    return *spacing_;
  }

  /// Trapezoidal quadrature weight of point i.
  double weight(std::size_t i) const {
    const std::size_t n = points_.size();
    if (i == 0) return 0.5 * (points_[1] - points_[0]);
    if (i == n - 1) return 0.5 * (points_[n - 1] - points_[n - 2]);
    return 0.5 * (points_[i + 1] - points_[i - 1]);
  }

 private:
  explicit ChiGrid(std::vector<double> pts) : points_(std::move(pts)) {
    if (points_.size() < 2)
      throw domain_error("chi grid needs at least two points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i]))
        throw domain_error("chi grid points must be finite");
      if (i > 0 && !(points_[i] > points_[i - 1]))
        throw domain_error("chi grid points must be strictly increasing");
    }
  }

  std::vector<double> points_;
  std::optional<double> spacing_;
};

/// Sampled complex amplitude f(chi) of one mode.
struct WavePacket {
  BlipMode mode;
  ChiGrid grid;
  std::vector<std::complex<double>> amplitudes;

  WavePacket(BlipMode m, ChiGrid g, std::vector<std::complex<double>> a)
      : mode(m), grid(std::move(g)), amplitudes(std::move(a)) {
    if (amplitudes.size() != grid.size())
      throw domain_error("wave packet needs one amplitude per grid point");
  }

  /// Sum over the grid of |f_i|^2 * w_i (trapezoidal weights).
  double norm_squared() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i)
      sum += std::norm(amplitudes[i]) * grid.weight(i);
    return sum;
  }

  WavePacket normalized() const {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw domain_error("cannot normalize a null packet");
    WavePacket out = *this;
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : out.amplitudes) a *= scale;
    return out;
  }
};

struct Vacuum {
  friend bool operator==(const Vacuum&, const Vacuum&) = default;
};
struct SinglePhoton {
  WavePacket packet;
};
/// Classical-like state described entirely by its amplitude function.
struct CoherentState {
  WavePacket packet;
};

using FieldState = std::variant<Vacuum, SinglePhoton, CoherentState>;

/// Amplitude factor carried by a local excitation under a frame change:
/// sqrt(gamma*(1 - s*beta)), the inverse square root of the local Doppler
/// factor. Always > 0; factor^2 * doppler_factor = 1.
inline double blip_amplitude_factor(Beta beta, Direction s) {
  return std::sqrt(lorentz_gamma(beta) *
                   (1.0 - direction_sign(s) * beta.value()));
}

/// Push a wave packet through a frame map: grid points go to their images,
/// amplitudes pick up 1/sqrt(jacobian), the mode is unchanged. The output
/// grid is non-uniform (the exact images), so locality and the per-region
/// excitation count survive exactly; norm is preserved up to discretization.
inline WavePacket transform_wavepacket(const FrameMap& fm,
                                       const WavePacket& wp) {
  if (wp.mode.s != fm.direction())
    throw domain_error(
        "wave packet propagation direction does not match the frame map");
  const auto& pts = wp.grid.points();
  std::vector<double> mapped(pts.size());
  // cumulative increments keep adjacent images mutually consistent
  double acc = fm.map(pts.front());
  mapped[0] = acc;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    acc += fm.map_increment(pts[i - 1], pts[i]);
    mapped[i] = acc;
  }
  std::vector<std::complex<double>> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    out[i] = wp.amplitudes[i] / std::sqrt(fm.jacobian_at(pts[i]));
  return WavePacket(wp.mode, ChiGrid::from_points(std::move(mapped)),
                    std::move(out));
}

/// Vacuum maps to vacuum with no computation; packet-bearing states carry
/// their packets through transform_wavepacket.
inline FieldState transform_state(const FrameMap& fm, const FieldState& state) {
  return std::visit(
      [&](const auto& s) -> FieldState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Vacuum>) {
          return Vacuum{};
        } else {
          return T{transform_wavepacket(fm, s.packet)};
        }
      },
      state);
}

/// Expected excitation count in [chi_lo, chi_hi]: sum of |f_i|^2 * w_i over
/// the grid points inside the region.
inline double number_in_region(const WavePacket& wp, double chi_lo,
                               double chi_hi) {
  if (!std::isfinite(chi_lo) || !std::isfinite(chi_hi) || !(chi_lo <= chi_hi))
    throw domain_error("region needs finite chi_lo <= chi_hi");
  double sum = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < wp.grid.size(); ++i) {
    const double chi = wp.grid[i];
    if (chi < chi_lo || chi > chi_hi) continue;
    any = true;
    sum += std::norm(wp.amplitudes[i]) * wp.grid.weight(i);
  }
  if (!any)
    throw empty_region("region [" + std::to_string(chi_lo) + ", " +
                       std::to_string(chi_hi) + "] contains no grid points");
  return sum;
}

/// Discrete commutator value [a_i, a_j-dagger] on a uniform grid:
/// delta_ij / dchi for equal modes, 0 whenever s or lambda differ.
inline double commutator_value(const ChiGrid& grid, std::size_t i,
                               std::size_t j, BlipMode mode_i,
                               BlipMode mode_j) {
  if (!grid.is_uniform())
    throw domain_error("commutator value is defined on uniform grids");
  if (!(mode_i == mode_j)) return 0.0;
  return (i == j) ? 1.0 / grid.spacing() : 0.0;
}

/// Validate the discrete commutator convention on a uniform grid: for equal
/// modes every row resolves the identity (sum_j value * dchi = 1) and for
/// differing s or lambda every row sums to 0. Returns the largest absolute
/// deviation found.
inline double commutator_check(const ChiGrid& grid) {
  if (!grid.is_uniform())
    throw domain_error("commutator check is defined on uniform grids");
  const double dchi = grid.spacing();
  const BlipMode base{Direction::plus_x, Polarization::H};
  const BlipMode other_lambda{Direction::plus_x, Polarization::V};
  const BlipMode other_s{Direction::minus_x, Polarization::H};
  double max_dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double same = 0.0, cross_l = 0.0, cross_s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      same += commutator_value(grid, i, j, base, base) * dchi;
      cross_l += commutator_value(grid, i, j, base, other_lambda) * dchi;
      cross_s += commutator_value(grid, i, j, base, other_s) * dchi;
    }
    max_dev = std::max({max_dev, std::abs(same - 1.0), std::abs(cross_l),
                        std::abs(cross_s)});
  }
  return max_dev;
}

struct ResampleResult {
  WavePacket packet;
  double norm_squared_before{};
  double norm_squared_after{};
};

/// Linear resampling onto a uniform grid over the same span. The change of
/// norm is reported, never applied.
inline ResampleResult resample_uniform(const WavePacket& wp,
                                       std::size_t n_points) {
  ChiGrid grid = ChiGrid::uniform(wp.grid.front(), wp.grid.back(), n_points);
  std::vector<std::complex<double>> amps(grid.size());
  const auto& src = wp.grid.points();
  std::size_t k = 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double chi = grid[i];
    while (k + 1 < src.size() && src[k] < chi) ++k;
    const double w = (chi - src[k - 1]) / (src[k] - src[k - 1]);
    amps[i] = wp.amplitudes[k - 1] +
              (wp.amplitudes[k] - wp.amplitudes[k - 1]) * w;
  }
  WavePacket out(wp.mode, std::move(grid), std::move(amps));
  return {out, wp.norm_squared(), out.norm_squared()};
}

}  // namespace chimap
