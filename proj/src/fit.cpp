#include "fujita/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "fujita/error.hpp"

namespace fujita::fit {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  const std::size_t n = std::min(x.size(), y.size());
  f.points = n;
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / n);
  if (n > 2 && sxx > 0) {
    const double se = std::sqrt(ss / (n - 2) / sxx);
    boost::math::students_t dist(static_cast<double>(n - 2));
    f.slope_halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  }
  return f;
}

DecayFit decay_fit(std::span<const double> t, std::span<const double> value, Window window,
                   const DecayFitOptions& options) {
  std::vector<double> lt, lv;
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = 0.0;
  for (std::size_t i = 0; i < std::min(t.size(), value.size()); ++i) {
    if (!(t[i] > 0.0) || t[i] < window.t_lo) continue;
    if (window.t_hi > 0.0 && t[i] > window.t_hi) continue;
    if (!(value[i] > 10.0 * options.floor) || !(value[i] > 0.0)) continue;
    lt.push_back(std::log(t[i]));
    lv.push_back(std::log(value[i]));
    t_min = std::min(t_min, t[i]);
    t_max = std::max(t_max, t[i]);
  }
  if (lt.size() < options.min_points || t_max < t_min * std::pow(10.0, options.min_decades) * (1 - 1e-9)) {
    throw Error(ErrorKind::InsufficientWindow,
                fmt::format("{} usable points over [{}, {}]; need {} spanning {} decade(s)", lt.size(),
                            t_min, t_max, options.min_points, options.min_decades));
  }
  const LinearFit lf = least_squares(lt, lv);
  DecayFit d;
  d.slope = lf.slope;
  d.intercept = lf.intercept;
  d.t_lo = t_min;
  d.t_hi = t_max;
  d.residual = lf.residual_rms;
  d.halfwidth = lf.slope_halfwidth;
  d.points = lf.points;
  return d;
}

EnvelopeFit chebyshev_envelope(std::span<const double> z, std::span<const double> y, double max_rate) {
  const std::size_t n = std::min(z.size(), y.size());
  auto offsets = [&](double rate) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = y[i] + rate * z[i];
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    return std::pair{hi, lo};
  };
  // the spread is a convex function of the rate (max of affine minus min of affine)
  double a = 0.0, b = max_rate;
  for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, max_rate); ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    const auto [h1, l1] = offsets(m1);
    const auto [h2, l2] = offsets(m2);
    if (h1 - l1 <= h2 - l2) {
      b = m2;
    } else {
      a = m1;
    }
  }
  EnvelopeFit e;
  e.rate = 0.5 * (a + b);
  const auto [hi, lo] = offsets(e.rate);
  e.upper_offset = hi;
  e.lower_offset = lo;
  return e;
}

}  // namespace fujita::fit
