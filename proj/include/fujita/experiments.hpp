#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fujita/evolution.hpp"
#include "fujita/fit.hpp"

namespace fujita::experiments {

/// p_* = 1 + (2 - alpha) / N.
double critical_exponent(double alpha, int n);

struct ExponentTable {
  double alpha = 0.0;
  int n = 1;
  double p = 2.0;
  double p_star = 0.0;
  double r_star = 0.0;  // N (p - 1) / (2 - alpha)

  static ExponentTable make(double alpha, int n, double p);
  /// Decay exponent of ||u(t)||_q (strong or weak): (N/(2-alpha))(1/r_star - 1/q).
  double decay(double q) const;
  bool supercritical() const { return p > p_star; }
};

enum class Consistency { Consistent, Inconsistent, Undecided, ConsistentWithSmallnessHypothesis };

std::string_view to_string(Consistency c);

struct PhasePoint {
  double p = 0.0;
  double alpha = 0.0;
  int n = 1;
  double amplitude = 0.0;
  ExponentTable table;
  std::optional<evolution::OutcomeKind> outcome;
  double t_blowup_lo = 0.0;
  double t_blowup_hi = 0.0;
  std::optional<fit::DecayFit> slope_inf;
  std::optional<fit::DecayFit> slope_weak_rstar;
  Consistency consistency = Consistency::Undecided;
  std::string error;  // set when the run raised; the row is still emitted
};

struct ClassifyOptions {
  double tolerance = 0.15;
};

/// Runs the configuration and labels the outcome against the dichotomy.
/// Decay slopes are fitted over the last decade before the horizon.
PhasePoint classify(const evolution::RunConfig& config, const ClassifyOptions& options = {});

struct DeltaSearch {
  double delta = 0.0;
  int halvings = 0;
  evolution::RunOutcome outcome;
};

/// Halves the data amplitude from config.data.amplitude until the run
/// reaches the horizon without blowing up.
DeltaSearch search_global_delta(const evolution::RunConfig& config, int max_halvings = 30);

struct AkConstant {
  double product = 1.0;        // prod_{j <= j_max} ((p^{j+1} - 1)/(p - 1))^{p^{-j-1}}
  double log_product = 0.0;
  double tail_bound = 0.0;     // bound on (full product) - product
  double comparison_bound = 0.0;  // exp of the full comparison series
  std::vector<double> partial_products;
};

AkConstant ak_constant(double p, int j_max);

struct Lemma31Report {
  std::vector<double> times;
  std::vector<double> values;  // t^{1/(p-1)} ||S(t) phi||_inf
  double sup_value = 0.0;
  double sup_time = 0.0;
  fit::DecayFit slope;
  double expected_slope = 0.0;  // 1/(p-1) - N/(2-a)
};

/// ||S(t) phi||_inf at each time, advancing between consecutive times with
/// `substeps` implicit steps.
std::vector<double> linear_sup_series(const evolution::RunConfig& config, std::span<const double> times,
                                      int substeps = 32);

Lemma31Report lemma31_functional(std::span<const double> times, std::span<const double> sup_norms, double p,
                                 double alpha, int n, fit::Window window);

struct MassGrowthReport {
  std::vector<double> times;
  std::vector<double> mass;
  evolution::OutcomeKind outcome = evolution::OutcomeKind::HorizonReached;
  double t_end = 0.0;
  double slope = 0.0;              // d(mass) / d(log10 t)
  double relative_residual = 0.0;  // rms residual / slope
  std::size_t points = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Mass against log t over the decade ending at `window_end` (0: the last
/// snapshot before blow-up or the horizon). Requires p = p_* unless
/// `require_critical` is false. Throws NotApplicable for zero data and
/// InsufficientWindow below 8 points.
MassGrowthReport critical_mass_growth(const evolution::RunConfig& config, double window_end = 0.0,
                                      bool require_critical = true);

/// One classify() per (p, alpha) node, p varying fastest. Nodes run
/// concurrently on `jobs` threads; rows come back in node order.
std::vector<PhasePoint> sweep(const evolution::RunConfig& base, std::span<const double> p_grid,
                              std::span<const double> alpha_grid, int jobs, const ClassifyOptions& options = {});

void write_sweep_csv(std::ostream& out, std::span<const PhasePoint> rows);

}  // namespace fujita::experiments
