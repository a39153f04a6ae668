#pragma once

#include <stdexcept>

namespace chimap {

/// Base type for all failures raised by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of an operation: invalid construction
/// values, a time beyond a sampled worldline's range, preconditions on
/// counts and intervals.
class domain_error : public error {
 public:
  using error::error;
};

/// The light line never crosses the worldline.
class no_intersection : public error {
 public:
  using error::error;
};

/// The refinement budget ran out before the requested accuracy was reached.
class tolerance_not_met : public error {
 public:
  using error::error;
};

/// The target value lies outside the image of a monotone map.
class out_of_range : public error {
 public:
  using error::error;
};

/// A region query that selects no grid points.
class empty_region : public error {
 public:
  using error::error;
};

/// Invalid or inconsistent run configuration.
class config_error : public error {
 public:
  using error::error;
};

}  // namespace chimap
