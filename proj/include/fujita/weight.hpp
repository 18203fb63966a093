#pragma once

#include <span>
#include <string>
#include <string_view>

namespace fujita {

enum class WeightKind { AxisPower, RadialPower };

std::string_view to_string(WeightKind kind);
WeightKind parse_weight_kind(std::string_view name);

/// Power-law diffusion coefficient: |x_1|^exponent (AxisPower) or
/// |x|^exponent (RadialPower) on R^dim.
struct Weight {
  WeightKind kind = WeightKind::AxisPower;
  double exponent = 0.0;
  int dim = 1;

  /// Exponent ranges under which the Fujita dichotomy applies:
  /// AxisPower needs (-1, 1), tightened to (-1, 2/N) for N >= 3.
  /// RadialPower needs (-1, 1) for N = 1 and (-N, 1) for N >= 2.
  bool admissible() const;

  /// Distance from the singular set: |x_1| or |x|.
  double singular_distance(std::span<const double> x) const;

  /// w(x). Throws SingularPoint when exponent < 0 and x is on the singular set.
  double evaluate(std::span<const double> x) const;

  /// Throws InadmissibleWeight unless admissible().
  void require_admissible() const;

  std::string describe() const;
};

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

}  // namespace fujita
