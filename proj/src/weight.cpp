#include "fujita/weight.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fujita/error.hpp"

namespace fujita {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::EnvelopeViolation: return "EnvelopeViolation";
    case ErrorKind::InadmissibleWeight: return "InadmissibleWeight";
    case ErrorKind::BoundaryContamination: return "BoundaryContamination";
    case ErrorKind::SandwichViolation: return "SandwichViolation";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::IterateOverflow: return "IterateOverflow";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::InsufficientWindow: return "InsufficientWindow";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::string_view to_string(WeightKind kind) {
  return kind == WeightKind::AxisPower ? "axis" : "radial";
}

WeightKind parse_weight_kind(std::string_view name) {
  if (name == "axis") return WeightKind::AxisPower;
  if (name == "radial") return WeightKind::RadialPower;
  throw Error(ErrorKind::ConfigError, fmt::format("unknown weight kind '{}'", name));
}

bool Weight::admissible() const {
  if (dim < 1 || !std::isfinite(exponent)) return false;
  if (kind == WeightKind::AxisPower) {
    if (!(exponent > -1.0 && exponent < 1.0)) return false;
    return dim < 3 || exponent < 2.0 / dim;
  }
  if (dim == 1) return exponent > -1.0 && exponent < 1.0;
  return exponent > -static_cast<double>(dim) && exponent < 1.0;
}

void Weight::require_admissible() const {
  if (!admissible()) {
    throw Error(ErrorKind::InadmissibleWeight, describe() + " is outside the admissible range");
  }
}

double Weight::singular_distance(std::span<const double> x) const {
  if (kind == WeightKind::AxisPower || dim == 1) return std::abs(x[0]);
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

double Weight::evaluate(std::span<const double> x) const {
  const double d = singular_distance(x);
  if (exponent == 0.0) return 1.0;
  if (d == 0.0) {
    if (exponent < 0.0) {
      throw Error(ErrorKind::SingularPoint,
                  fmt::format("{} evaluated on its singular set", describe()));
    }
    return 0.0;
  }
  return std::pow(d, exponent);
}

std::string Weight::describe() const {
  return fmt::format("{}(exponent={}, N={})", to_string(kind), exponent, dim);
}

double unit_ball_volume(int n) {
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

}  // namespace fujita
