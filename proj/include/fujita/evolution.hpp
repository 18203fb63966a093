#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fujita/grid.hpp"
#include "fujita/propagator.hpp"
#include "fujita/weight.hpp"

namespace fujita::evolution {

enum class DataKind { Bump, Threshold, Constant, Gaussian, Indicator };

std::string_view to_string(DataKind kind);
DataKind parse_data_kind(std::string_view name);

/// Initial data menu. `amplitude` is the peak value (delta for Threshold);
/// `radius` is the support radius of Bump/Indicator and the width of Gaussian.
struct DataSpec {
  DataKind kind = DataKind::Bump;
  double amplitude = 1.0;
  double radius = 1.0;

  /// Radius outside which the data vanishes, 0 when it has no compact support.
  double support_radius() const;
};

/// Pointwise value of the data at x for weight exponent alpha and power p.
double data_value(const DataSpec& spec, std::span<const double> x, double alpha, double p);

/// Cell averages of the data on the grid.
Field initial_field(const DataSpec& spec, const Grid& grid, double alpha, double p);

/// delta / (1 + |x|^{(2-alpha)/(p-1)}) as cell averages.
Field threshold_data(double delta, double alpha, double p, const Grid& grid);

struct RunConfig {
  Weight weight;
  double p = 2.0;
  double half_width = 16.0;
  int cells = 1024;
  DataSpec data;
  double horizon = 1.0;
  double dt0 = 1e-3;
  double theta = 0.5;
  double umax = 1e8;
  Boundary boundary = Boundary::Reflecting;
  int per_decade = 8;
  double snapshot_t0 = 1e-2;

  /// Step size grows like growth * t once that exceeds dt0.
  double growth = 0.02;
  /// 0 selects the adaptive ladder; otherwise every step uses this value
  /// (still cut down by the source cap).
  double fixed_dt = 0.0;
  double dt_min = 1e-14;
  std::vector<double> strong_orders{std::numeric_limits<double>::infinity()};
  std::vector<double> weak_orders;
  bool guard = true;
  bool keep_fields = false;
  bool source_euler = false;

  Grid grid() const { return Grid(weight.dim, half_width, cells); }
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

enum class OutcomeKind { BlowUp, Global, HorizonReached };

std::string_view to_string(OutcomeKind kind);

struct Channel {
  std::string name;
  double order = 0.0;
  bool weak = false;
  std::vector<double> times;
  std::vector<double> values;
};

struct RunOutcome {
  OutcomeKind kind = OutcomeKind::HorizonReached;
  double t_estimate = 0.0;
  double t_lower = 0.0;
  double t_upper = 0.0;
  double final_time = 0.0;
  std::vector<Channel> channels;
  std::vector<double> mass_times;
  std::vector<double> mass;
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;  // only with keep_fields
  Field final_field;
  std::size_t steps = 0;
  std::size_t cap_limited_steps = 0;
  bool step_underflow = false;

  const Channel* channel(std::string_view name) const;
};

/// Owns one evolving solution. Each step runs the implicit diffusion solve
/// and then the pointwise source over the same dt.
class Stepper {
 public:
  Stepper(const RunConfig& config, std::shared_ptr<PropagatorCache> cache, Field initial);

  double time() const { return t_; }
  const Field& state() const { return u_; }
  double sup() const;

  /// Largest dt allowed by the source cap theta / (p ||u||^{p-1}).
  double cap() const;
  /// Step size the adaptive ladder would take next, before and after the cap.
  double uncapped_dt() const;
  double proposed_dt() const;

  void step(double dt);

 private:
  RunConfig config_;
  std::shared_ptr<PropagatorCache> cache_;
  Field u_;
  double t_ = 0.0;
};

/// Snaps dt down onto the ladder dt0 * 2^{k/4}, so repeated requests hit the
/// propagator cache.
double ladder_dt(double target, double dt0);

std::shared_ptr<PropagatorCache> make_cache(const RunConfig& config);

/// Integrates to the horizon or until blow-up. Throws BoundaryContamination
/// when a global claim fails the domain guard.
RunOutcome run(const RunConfig& config, std::shared_ptr<PropagatorCache> cache = nullptr);
RunOutcome run(const RunConfig& config, const Field& initial, std::shared_ptr<PropagatorCache> cache = nullptr);

struct PicardResult {
  double tau = 0.0;
  double slice = 0.0;
  std::vector<double> times;
  std::vector<std::vector<Field>> iterates;  // iterates[n][k], n = 0 is u_1
  double linear_constant = 0.0;              // c_* = sup_t ||S(t) phi||_inf / ||phi||_inf
  double data_sup = 0.0;
  double max_monotonicity_violation = 0.0;   // max (u_n - u_{n+1})_+
  double sup_iterate = 0.0;
};

/// Local window length 1 / (2 p (2 c ||phi||_inf)^{p-1}).
double picard_window(double p, double linear_constant, double data_sup);

/// Picard iterates of the mild formulation on a uniform lattice of `slices`
/// panels over [0, tau] (tau <= 0 selects picard_window). Throws
/// IterateOverflow if an iterate exceeds umax.
PicardResult picard_iterate(const RunConfig& config, int n_max, double tau = 0.0, int slices = 64);

/// Time-stepped solution on the same lattice, for comparison with the iterates.
std::vector<Field> stepped_on_lattice(const RunConfig& config, double tau, int slices);

struct StabilityResult {
  std::vector<double> times;
  std::vector<double> ratios;  // running sup ||u1 - u2||_inf / ||phi1 - phi2||_inf
  double ratio = 0.0;
};

/// Runs both solutions in lockstep to sigma. Throws NotApplicable if either
/// blows up first.
StabilityResult stability_check(const RunConfig& config, const Field& phi1, const Field& phi2, double sigma);

struct ScalingResult {
  double lambda = 1.0;
  double alpha = 0.0;
  double deviation = 0.0;
  std::vector<double> times;
  std::vector<double> deviations;
};

/// Compares lambda^alpha u(lambda x, lambda^{2-a} t) with the solution for
/// the rescaled data, alpha = (2-a)/(p-1). The base run uses the box
/// lambda L with lambda n cells so both grids share the spacing. Fixed
/// steps of config.fixed_dt (scaled by lambda^{-(2-a)}) up to config.horizon
/// in the rescaled time.
ScalingResult scaling_covariance_check(const RunConfig& config, double lambda, int snapshots = 8);

}  // namespace fujita::evolution
