#pragma once

#include <stdexcept>
#include <string>

namespace aqmsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// schedule() called with a fire time behind the simulated clock.
struct SchedulingInPast : Error {
  using Error::Error;
};

/// Percentile/CDF of an empty sample series.
struct EmptySeries : Error {
  using Error::Error;
};

/// Invalid or inconsistent scenario/manifest fields.
struct ConfigError : Error {
  using Error::Error;
};

/// Output directory or file could not be written/read.
struct IoError : Error {
  using Error::Error;
};

}  // namespace aqmsim
