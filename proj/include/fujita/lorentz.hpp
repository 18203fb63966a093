#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "fujita/grid.hpp"

namespace fujita::lorentz {

/// Decreasing rearrangement f* of a cell-average field. Because the field is
/// a step function, f* is a step function too: it equals thresholds[k] on
/// [measures[k-1], measures[k]) and 0 beyond the last measure.
struct RearrangementTable {
  std::vector<double> thresholds;  // distinct |f| > 0, strictly decreasing
  std::vector<double> measures;    // cumulative measure, strictly increasing
  std::vector<double> prefix;      // \int_0^{measures[k]} f*

  double total_measure() const { return measures.empty() ? 0.0 : measures.back(); }
  double f_star(double s) const;
  double f_star_star(double s) const;
  /// |{s : f*(s) > lambda}|
  double distribution(double lambda) const;
};

/// mu(lambda) = |{x : |f(x)| > lambda}|
double distribution_function(const Field& f, double lambda);

RearrangementTable rearrangement(const Field& f);

/// f#(x) = f*(c_N |x|^N) realised on the grid: the sorted values are handed
/// out to cells in order of increasing center distance, so the result is a
/// permutation of |f| and exactly equimeasurable with it.
Field spherical_rearrangement(const Field& f);

enum class NormKind { Weak, Strong };

struct LorentzNorm {
  double r = 0.0;
  double value = 0.0;
  NormKind kind = NormKind::Strong;
};

/// sup_{s>0} s^{1/r} f**(s). On each step of f* the function s^{1/r} f**(s)
/// has the form s^{1/r - 1}(A + v s) with A >= 0, whose only critical point
/// is a minimum, so the supremum is taken over the breakpoints.
/// r = infinity gives ||f||_inf and r = 1 the total integral; r < 1 throws
/// Unbounded.
LorentzNorm weak_norm(const RearrangementTable& table, double r);
LorentzNorm weak_norm(const Field& f, double r);

/// Cell-measure weighted L^q norm; q = infinity is max |f|.
LorentzNorm strong_norm(const Field& f, double q);

/// ||prod f_j||_{r,inf} / prod ||f_j||_{r_j,inf} with 1/r = sum 1/r_j.
/// Empty when some ||f_j||_{r_j,inf} vanishes.
std::optional<double> weak_holder_ratio(std::span<const Field> fields, std::span<const double> exponents);

/// CSV rows (s, f*, f**, s^{1/r} f**) at the breakpoints of f*.
void write_table_csv(std::ostream& out, const RearrangementTable& table, double r);

}  // namespace fujita::lorentz
