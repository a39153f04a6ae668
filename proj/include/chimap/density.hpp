#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "chimap/errors.hpp"
#include "chimap/lightcone.hpp"

namespace chimap {

struct DensitySample {
  double chi_a{};
  double ratio{};
};

/// Sampled curve of the moving-to-stationary worldline density ratio along
/// chi_A, for one propagation direction.
struct DensityProfile {
  std::vector<DensitySample> samples;
  Direction s{Direction::plus_x};
};

/// Ratio of light-like worldline densities (per unit chi) between the moving
/// and the stationary frame: dchi_A/dchi_B = 1/jacobian. Always > 0.
inline double worldline_density_ratio(const FrameMap& fm, double chi_a) {
  return 1.0 / fm.jacobian_at(chi_a);
}

/// Zero-point energy density ratio between the frames. The energy carried
/// per worldline is frame-invariant and normalized to 1, so this equals the
/// worldline density ratio.
inline double zero_point_energy_ratio(const FrameMap& fm, double chi_a) {
  return worldline_density_ratio(fm, chi_a);
}

/// Density ratio sampled at n_samples evenly spaced chi_A in [chi_lo,
/// chi_hi]. Constant-velocity observers give a flat profile; accelerating
/// ones do not.
inline DensityProfile density_profile(const FrameMap& fm, double chi_lo,
                                      double chi_hi, std::size_t n_samples) {
  if (n_samples < 2)
    throw domain_error("density profile needs at least two samples");
  if (!std::isfinite(chi_lo) || !std::isfinite(chi_hi) || !(chi_lo < chi_hi))
    throw domain_error("density profile needs finite chi_lo < chi_hi");
  DensityProfile profile;
  profile.s = fm.direction();
  profile.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double chi =
        chi_lo + (chi_hi - chi_lo) * (static_cast<double>(i) /
                                      static_cast<double>(n_samples - 1));
    profile.samples.push_back({chi, worldline_density_ratio(fm, chi)});
  }
  return profile;
}

}  // namespace chimap
