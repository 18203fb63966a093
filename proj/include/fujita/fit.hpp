#pragma once

#include <cstddef>
#include <span>

namespace fujita::fit {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double slope_halfwidth = 0.0;  // 95% confidence
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct Window {
  double t_lo = 0.0;
  double t_hi = 0.0;  // 0 means unbounded
};

/// Log-log slope of a (t, value) series restricted to a window.
struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;   // log value at t = 1
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual = 0.0;    // rms of log residuals
  double halfwidth = 0.0;   // 95% confidence half-width of the slope
  std::size_t points = 0;
};

struct DecayFitOptions {
  std::size_t min_points = 8;
  double min_decades = 1.0;
  double floor = 0.0;  // values must exceed 10 * floor
};

/// Throws InsufficientWindow unless at least min_points usable samples span
/// min_decades decades of t.
DecayFit decay_fit(std::span<const double> t, std::span<const double> value, Window window,
                   const DecayFitOptions& options = {});

/// Two parallel lines bounding (z_i, y_i) in the Chebyshev sense:
/// lower_offset - rate z <= y <= upper_offset - rate z, with the rate chosen
/// in [0, max_rate] to minimise upper_offset - lower_offset.
struct EnvelopeFit {
  double rate = 0.0;
  double upper_offset = 0.0;
  double lower_offset = 0.0;
  double spread() const { return upper_offset - lower_offset; }
};

EnvelopeFit chebyshev_envelope(std::span<const double> z, std::span<const double> y, double max_rate);

}  // namespace fujita::fit
