#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fujita/weight.hpp"

namespace fujita::geometry {

struct Tolerances {
  double rtol_1d = 1e-9;
  double rtol_nd = 1e-6;
};

/// \int_{B_r(x)} d(y)^power dy, where d is the weight's singular distance
/// (|y_1| or |y|) and x enters only through `offset` = d(x).
/// Requires power > -1 (axis) or power > -N (radial).
double ball_power_integral(const Weight& w, double offset, double radius, double power,
                           const Tolerances& tol = {});

/// h_x(r) = (\int_{B_r(x)} w^{-N/2})^{2/N}.
double h(const Weight& w, std::span<const double> x, double r, const Tolerances& tol = {});
double h_at_offset(const Weight& w, double offset, double r, const Tolerances& tol = {});

/// Inverse of r -> h_x(r), by geometric bracketing around t^{1/(2-exponent)}
/// followed by bisection in log r until |h - t| <= rtol * t.
double h_inverse(const Weight& w, std::span<const double> x, double t, double rtol = 1e-10,
                 const Tolerances& tol = {});
double h_inverse_at_offset(const Weight& w, double offset, double t, double rtol = 1e-10,
                           const Tolerances& tol = {});

struct Ball {
  std::vector<double> center;
  double radius = 1.0;
};

/// Deterministic ball family: centers on and off the singular set with
/// singular distances and radii log-spaced over [min_scale, max_scale] and
/// jittered from a seeded stream.
struct BallSampler {
  int dim = 1;
  int centers = 9;
  int radii = 9;
  double min_scale = 1e-3;
  double max_scale = 1e3;
  std::uint64_t seed = 1;
  std::vector<Ball> sample() const;
};

/// sup over the sampled balls of avg(w) * avg(w^{-1/(p-1)})^{p-1}.
double muckenhoupt_constant(const Weight& w, double p_class, const BallSampler& sampler,
                            const Tolerances& tol = {});

struct DoublingSample {
  double offset = 0.0;
  double radius = 0.0;
  double order = 0.0;  // fitted log-ratio slope divided by N
};

struct DoublingReport {
  std::vector<DoublingSample> samples;
  double order = 0.0;         // fitted at centers on the singular set
  double expected_order = 0;  // 1 - exponent / 2
  double min_order = 0.0;
  double max_order = 0.0;
  double upper_constant = 0.0;  // C1 in ratio <= C1 s^{order N}
  double lower_constant = 0.0;  // C2 in ratio >= C2 s^{order N}
  double tolerance = 0.02;
  bool pass = false;
};

DoublingReport doubling_report(const Weight& w, std::span<const double> s_values,
                               const BallSampler& sampler, double tolerance = 0.02,
                               const Tolerances& tol = {});

enum class EnvelopeRegime { Upper, Lower };

/// One piece of a piecewise power envelope. The piece applies when
/// r / |x_1| lies in [min_ratio, max_ratio); value = coefficient * r^power * |x_1|^offset_power.
struct EnvelopePiece {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double coefficient = 1.0;
  double power = 2.0;
  double offset_power = 0.0;
};

struct HEnvelope {
  EnvelopeRegime regime = EnvelopeRegime::Upper;
  std::vector<EnvelopePiece> pieces;

  double shape(double offset, double r) const;  // envelope with coefficient 1
  double evaluate(double offset, double r) const;
};

struct EnvelopeSample {
  double offset = 0.0;
  double radius = 0.0;
  double h = 0.0;
};

struct EnvelopeReport {
  HEnvelope upper;
  HEnvelope lower;
  std::vector<EnvelopeSample> samples;
  double worst_ratio = 0.0;      // C / C'
  double small_r_power = 0.0;    // fitted on r <= 0.01 |x_1|, expect 2
  double large_r_power = 0.0;    // fitted on r >= 100 |x_1|, expect 2 - a
  bool pass = false;
};

/// 2 * per_regime samples: half with r <= |x_1|, half with r >= |x_1|.
std::vector<EnvelopeSample> lemma21_sample(const Weight& w, int per_regime, std::uint64_t seed);

/// Fits the constants of the piecewise h_x envelopes (axis weight only).
/// Throws EnvelopeViolation if the sample contradicts the envelope shape.
EnvelopeReport verify_lemma21(const Weight& w, std::span<const EnvelopeSample> sample,
                              const Tolerances& tol = {});

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fujita::geometry
