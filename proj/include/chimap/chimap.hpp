#pragma once

// Natural light-cone coordinate maps, local light excitations and worldline
// densities for stationary vs. arbitrarily moving observers in 1+1
// dimensions (c = 1).

#include "chimap/blipfield.hpp"
#include "chimap/density.hpp"
#include "chimap/errors.hpp"
#include "chimap/lightcone.hpp"
#include "chimap/pulsetrain.hpp"
#include "chimap/trajectory.hpp"
