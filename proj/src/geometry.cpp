#include "fujita/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "fujita/error.hpp"
#include "fujita/quadrature.hpp"

namespace fujita::geometry {
namespace {

double interval_power_integral(double d, double r, double power) {
  return quad::power_interval(d, r, power);
}

double chord(double y, double d, double r, int dim) {
  const double s = y - d;
  const double c2 = std::max(0.0, (r - s) * (r + s));
  if (dim == 2) return 2.0 * std::sqrt(c2);
  return unit_ball_volume(dim - 1) * std::pow(c2, 0.5 * (dim - 1));
}

double axis_ball_integral(int dim, double d, double r, double power, double rtol) {
  d = std::abs(d);
  auto g = [&](double y) { return chord(y, d, r, dim); };
  if (d < r) {
    // split at the singular hyperplane so the power factor sits at an endpoint
    const double right = quad::power_singular(g, d + r, -power, rtol).value;
    const double left = quad::power_singular(g, d - r, -power, rtol).value;
    return left + right;
  }
  auto f = [&](double y) { return std::pow(std::abs(y), power) * g(y); };
  return quad::endpoint_singular(f, d - r, d + r, rtol).value;
}

// \int_0^theta sin^{n} phi dphi
double cap_integral(double theta, int n, double rtol) {
  if (n == 0) return theta;
  if (n == 1) return 1.0 - std::cos(theta);
  auto f = [n](double phi) { return std::pow(std::sin(phi), n); };
  return quad::adaptive(f, 0.0, theta, rtol, 1e-300).value;
}

double radial_ball_integral(int dim, double d, double r, double power, double rtol) {
  const double sphere = dim * unit_ball_volume(dim);
  const double q = power + dim;
  if (d == 0.0) return sphere * std::pow(r, q) / q;
  double total = 0.0;
  if (r > d) total += sphere * std::pow(r - d, q) / q;
  const double sub_sphere = (dim - 1) * unit_ball_volume(dim - 1);
  // rho = d + s; both factors under the cap angle vanish at an endpoint, so
  // they are formed from the exact endpoint distance
  const double lo = std::abs(r - d) - d;
  auto f = [&](double s, double xc) {
    const double rho = d + s;
    double minus_lo = r + s;            // vanishes at s = -r
    double plus_lo = rho + d - r;       // vanishes at s = r - 2d
    double minus_hi = r - s;
    if (xc < 0.0) {
      (r >= d ? plus_lo : minus_lo) = -xc;
    } else {
      minus_hi = xc;
    }
    const double one_minus = std::max(0.0, minus_hi * minus_lo);
    const double one_plus = std::max(0.0, plus_lo * (rho + d + r));
    const double theta = 2.0 * std::atan2(std::sqrt(one_minus), std::sqrt(one_plus));
    return std::pow(rho, q - 1.0) * sub_sphere * cap_integral(theta, dim - 2, rtol);
  };
  total += quad::endpoint_singular_xc(f, lo, r, rtol).value;
  return total;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  return seed * 0x9E3779B97F4A7C15ULL + salt;
}

}  // namespace

double ball_power_integral(const Weight& w, double offset, double radius, double power,
                           const Tolerances& tol) {
  if (!(radius > 0.0)) {
    throw Error(ErrorKind::QuadratureFailure, fmt::format("ball radius {} must be positive", radius));
  }
  if (w.dim == 1) return interval_power_integral(offset, radius, power);
  if (power == 0.0) return unit_ball_volume(w.dim) * std::pow(radius, w.dim);
  if (w.kind == WeightKind::AxisPower) {
    return axis_ball_integral(w.dim, offset, radius, power, tol.rtol_nd);
  }
  return radial_ball_integral(w.dim, offset, radius, power, tol.rtol_nd);
}

double h_at_offset(const Weight& w, double offset, double r, const Tolerances& tol) {
  const double power = -0.5 * w.exponent * w.dim;
  const double integral = ball_power_integral(w, offset, r, power, tol);
  return std::pow(integral, 2.0 / w.dim);
}

double h(const Weight& w, std::span<const double> x, double r, const Tolerances& tol) {
  return h_at_offset(w, w.singular_distance(x), r, tol);
}

double h_inverse_at_offset(const Weight& w, double offset, double t, double rtol,
                           const Tolerances& tol) {
  const double guess = std::pow(t, 1.0 / (2.0 - w.exponent));
  double spread = 8.0;
  double lo = guess / spread;
  double hi = guess * spread;
  for (int grow = 0; grow < 64; ++grow) {
    if (h_at_offset(w, offset, lo, tol) <= t && h_at_offset(w, offset, hi, tol) >= t) break;
    spread *= 2.0;
    lo = guess / spread;
    hi = guess * spread;
  }
  double mid = std::sqrt(lo * hi);
  for (int it = 0; it < 200; ++it) {
    mid = std::sqrt(lo * hi);
    const double value = h_at_offset(w, offset, mid, tol);
    if (std::abs(value - t) <= rtol * t || hi / lo - 1.0 < 1e-15) break;
    (value < t ? lo : hi) = mid;
  }
  return mid;
}

double h_inverse(const Weight& w, std::span<const double> x, double t, double rtol,
                 const Tolerances& tol) {
  return h_inverse_at_offset(w, w.singular_distance(x), t, rtol, tol);
}

std::vector<Ball> BallSampler::sample() const {
  std::mt19937_64 rng(mix(seed, 0xba11));
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double decades = std::log10(max_scale / min_scale);
  std::vector<Ball> balls;
  for (int c = 0; c < centers; ++c) {
    double offset = 0.0;
    if (c > 0) {
      const double frac = centers > 2 ? static_cast<double>(c - 1) / (centers - 2) : 0.5;
      offset = min_scale * std::pow(10.0, decades * frac + jitter(rng));
    }
    std::vector<double> dir(dim);
    double norm = 0.0;
    for (auto& v : dir) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (int k = 0; k < radii; ++k) {
      const double frac = radii > 1 ? static_cast<double>(k) / (radii - 1) : 0.5;
      Ball b;
      b.radius = min_scale * std::pow(10.0, decades * frac + jitter(rng));
      // the center points along a random direction; for the axis weight the
      // singular distance is taken from the first coordinate
      b.center.resize(dim);
      for (int i = 0; i < dim; ++i) b.center[i] = offset * dir[i] / norm;
      if (dim > 1 && offset > 0.0) {
        b.center[0] = (dir[0] < 0 ? -offset : offset);
      }
      balls.push_back(std::move(b));
    }
  }
  return balls;
}

double muckenhoupt_constant(const Weight& w, double p_class, const BallSampler& sampler,
                            const Tolerances& tol) {
  if (!(p_class > 1.0)) {
    throw Error(ErrorKind::QuadratureFailure, "Muckenhoupt class must exceed 1");
  }
  if (w.exponent == 0.0) return 1.0;
  const double dual_power = -w.exponent / (p_class - 1.0);
  double sup = 0.0;
  for (const Ball& ball : sampler.sample()) {
    const double d = w.singular_distance(ball.center);
    const double volume = unit_ball_volume(w.dim) * std::pow(ball.radius, w.dim);
    const double avg_w = ball_power_integral(w, d, ball.radius, w.exponent, tol) / volume;
    const double avg_dual = ball_power_integral(w, d, ball.radius, dual_power, tol) / volume;
    sup = std::max(sup, avg_w * std::pow(avg_dual, p_class - 1.0));
  }
  return sup;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

DoublingReport doubling_report(const Weight& w, std::span<const double> s_values,
                               const BallSampler& sampler, double tolerance,
                               const Tolerances& tol) {
  DoublingReport report;
  report.tolerance = tolerance;
  report.expected_order = 1.0 - 0.5 * w.exponent;
  const double power = -0.5 * w.exponent * w.dim;
  std::vector<std::vector<double>> ratios;
  double on_axis_sum = 0.0;
  int on_axis = 0;
  for (const Ball& ball : sampler.sample()) {
    const double d = w.singular_distance(ball.center);
    const double base = ball_power_integral(w, d, ball.radius, power, tol);
    std::vector<double> r;
    for (double s : s_values) {
      r.push_back(ball_power_integral(w, d, s * ball.radius, power, tol) / base);
    }
    DoublingSample sample{d, ball.radius, log_log_slope(s_values, r) / w.dim};
    if (d == 0.0) {
      on_axis_sum += sample.order;
      ++on_axis;
    }
    report.samples.push_back(sample);
    ratios.push_back(std::move(r));
  }
  report.order = on_axis > 0 ? on_axis_sum / on_axis : std::numeric_limits<double>::quiet_NaN();
  report.min_order = std::numeric_limits<double>::infinity();
  report.max_order = -std::numeric_limits<double>::infinity();
  for (const auto& s : report.samples) {
    report.min_order = std::min(report.min_order, s.order);
    report.max_order = std::max(report.max_order, s.order);
  }
  report.upper_constant = 0.0;
  report.lower_constant = std::numeric_limits<double>::infinity();
  for (const auto& r : ratios) {
    for (std::size_t k = 0; k < s_values.size(); ++k) {
      const double scaled = r[k] / std::pow(s_values[k], report.order * w.dim);
      report.upper_constant = std::max(report.upper_constant, scaled);
      report.lower_constant = std::min(report.lower_constant, scaled);
    }
  }
  report.pass = std::abs(report.order - report.expected_order) <= tolerance &&
                std::isfinite(report.upper_constant) && report.lower_constant > 0.0;
  return report;
}

double HEnvelope::shape(double offset, double r) const {
  const double ratio = offset > 0.0 ? r / offset : std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces) {
    if (ratio >= piece.min_ratio && ratio < piece.max_ratio) {
      double v = std::pow(r, piece.power);
      if (piece.offset_power != 0.0) v *= std::pow(offset, piece.offset_power);
      return v;
    }
  }
  // ratio == +inf falls into the last piece
  const auto& last = pieces.back();
  return std::pow(r, last.power);
}

double HEnvelope::evaluate(double offset, double r) const {
  const double ratio = offset > 0.0 ? r / offset : std::numeric_limits<double>::infinity();
  double coefficient = pieces.back().coefficient;
  for (const auto& piece : pieces) {
    if (ratio >= piece.min_ratio && ratio < piece.max_ratio) coefficient = piece.coefficient;
  }
  return coefficient * shape(offset, r);
}

std::vector<EnvelopeSample> lemma21_sample(const Weight& w, int per_regime, std::uint64_t seed) {
  std::mt19937_64 rng(mix(seed, 0x1e221));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<EnvelopeSample> out;
  for (int regime = 0; regime < 2; ++regime) {
    for (int i = 0; i < per_regime; ++i) {
      EnvelopeSample s;
      s.offset = std::pow(10.0, -3.0 + 6.0 * u01(rng));
      const double log_ratio = 4.0 * u01(rng);
      if (regime == 0) {
        s.radius = s.offset * std::pow(10.0, -log_ratio);
      } else {
        s.radius = s.offset * std::pow(10.0, log_ratio);
        if (i % 10 == 0) s.offset = 0.0;
      }
      s.h = h_at_offset(w, s.offset, s.radius);
      out.push_back(s);
    }
  }
  return out;
}

EnvelopeReport verify_lemma21(const Weight& w, std::span<const EnvelopeSample> sample,
                              const Tolerances&) {
  if (w.kind != WeightKind::AxisPower || !(w.exponent > -1.0 && w.exponent < 1.0)) {
    throw Error(ErrorKind::NotApplicable, "h envelopes are stated for |x_1|^a with a in (-1, 1)");
  }
  const double a = w.exponent;
  const double inf = std::numeric_limits<double>::infinity();
  const HEnvelope single{EnvelopeRegime::Upper, {{0.0, inf, 1.0, 2.0 - a, 0.0}}};
  const HEnvelope split{EnvelopeRegime::Upper,
                        {{0.0, 1.0, 1.0, 2.0, -a}, {1.0, inf, 1.0, 2.0 - a, 0.0}}};
  EnvelopeReport report;
  report.upper = a >= 0.0 ? single : split;
  report.lower = a >= 0.0 ? split : single;
  report.lower.regime = EnvelopeRegime::Lower;
  report.samples.assign(sample.begin(), sample.end());

  double upper_c = 0.0;
  double lower_c = inf;
  std::vector<double> small_r, small_h, large_r, large_h;
  for (const auto& s : sample) {
    if (!(s.h > 0.0) || !std::isfinite(s.h)) {
      throw Error(ErrorKind::EnvelopeViolation,
                  fmt::format("h = {} at |x_1| = {}, r = {}", s.h, s.offset, s.radius));
    }
    upper_c = std::max(upper_c, s.h / report.upper.shape(s.offset, s.radius));
    lower_c = std::min(lower_c, s.h / report.lower.shape(s.offset, s.radius));
    if (s.offset > 0.0 && s.radius <= 0.01 * s.offset) {
      small_r.push_back(s.radius);
      small_h.push_back(s.h * std::pow(s.offset, a));
    }
    if (s.radius >= 100.0 * s.offset) {
      large_r.push_back(s.radius);
      large_h.push_back(s.h);
    }
  }
  for (auto& piece : report.upper.pieces) piece.coefficient = upper_c;
  for (auto& piece : report.lower.pieces) piece.coefficient = lower_c;
  report.worst_ratio = upper_c / lower_c;
  report.small_r_power = small_r.size() >= 2 ? log_log_slope(small_r, small_h) : 2.0;
  report.large_r_power = large_r.size() >= 2 ? log_log_slope(large_r, large_h) : 2.0 - a;
  if (std::abs(report.small_r_power - 2.0) > 0.05 ||
      std::abs(report.large_r_power - (2.0 - a)) > 0.05) {
    throw Error(ErrorKind::EnvelopeViolation,
                fmt::format("fitted piece powers {} / {} depart from 2 / {}", report.small_r_power,
                            report.large_r_power, 2.0 - a));
  }
  report.pass = std::isfinite(report.worst_ratio) && lower_c > 0.0 && upper_c < inf;
  return report;
}

}  // namespace fujita::geometry
