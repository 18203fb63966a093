#pragma once

#include <span>
#include <vector>

#include "fujita/grid.hpp"
#include "fujita/propagator.hpp"
#include "fujita/weight.hpp"

namespace fujita::kernel_lab {

/// t0 * 2^{k / per_octave} for k = 0, 1, ... while <= t1.
std::vector<double> geometric_times(double t0, double t1, int per_octave = 4);

/// Discrete fundamental solution with pole at y: the unit-mass delta
/// (shared equally by the cells whose closure contains y) evolved by the
/// propagator. Times are snapped to the propagator's step lattice.
struct KernelEstimate {
  std::vector<double> source;
  std::vector<double> times;
  std::vector<long> steps;
  std::vector<Field> fields;
  std::vector<double> mass_errors;
};

Field discrete_delta(const Grid& grid, std::span<const double> y);

/// Throws BoundaryContamination when more than 1e-6 of the mass sits in the
/// outer 10% shell at a requested time.
KernelEstimate estimate_kernel(const Propagator& prop, std::span<const double> y,
                               std::span<const double> times, bool guard = true);

/// S(t) phi at each (snapped) time.
std::vector<Field> evolve_snapshots(const Propagator& prop, const Field& phi,
                                    std::span<const double> times);

/// Largest relative deviation from the free heat kernel
/// (4 pi t)^{-N/2} exp(-|x-y|^2 / 4t) over cells with |x - y| <= radius_factor sqrt(t).
/// Meaningful for the constant weight only.
double gaussian_deviation(const KernelEstimate& kernel, double radius_factor = 4.0);

struct AxiomReport {
  double mass_error = 0.0;             // max |mass - 1| over snapshots (Reflecting)
  double restart_deviation = 0.0;      // S(t-s) applied to the s snapshot vs the t snapshot
  double composition_deviation = 0.0;  // sum_xi Gamma(x,xi,t-s) Gamma(xi,y,s) |cell| vs Gamma(x,y,t)
  double symmetry_deviation = 0.0;     // Gamma(x,y,t) vs Gamma(y,x,t)
  double s = 0.0;
  double t = 0.0;
  bool pass = false;
};

/// Checks mass conservation, the semigroup identity between snapshot indices
/// s_index < t_index, and x <-> y symmetry. Deviations are relative to the
/// peak of the time-t kernel.
AxiomReport verify_k_axioms(const Propagator& prop, const KernelEstimate& kernel,
                            std::size_t s_index, std::size_t t_index);

struct SandwichOptions {
  double peak_fraction = 1e-12;  // ignore samples below this fraction of the snapshot peak
  double distance_bound = 16.0;  // keep |x-y|^{2-a}/t <= distance_bound^{1-a}
  std::size_t max_samples_per_time = 400;
  double slope_tolerance = 0.05;
};

struct EnvelopeConstants {
  double upper = 0.0;        // C_*
  double lower = 0.0;        // c_*
  double upper_rate = 0.0;
  double lower_rate = 0.0;
  std::size_t samples = 0;
};

struct NormSlope {
  double r = 0.0;
  double slope = 0.0;
  double expected = 0.0;
  bool pass = false;
};

struct SandwichReport {
  EnvelopeConstants general;  // h_x based form
  EnvelopeConstants refined;  // explicit power-law form (axis weight)
  double diagonal_slope = 0.0;
  double expected_diagonal_slope = 0.0;
  std::vector<NormSlope> norm_slopes;
  bool pass = false;
};

SandwichReport verify_k3_sandwich(const Weight& w, const KernelEstimate& kernel,
                                  const SandwichOptions& options = {});

struct SmoothingPair {
  double q = 1.0;
  double r = 1.0;
  bool weak = false;
};

struct SmoothingResult {
  SmoothingPair pair;
  double theta = 0.0;
  double max_ratio = 0.0;
  double last_ratio = 0.0;
  double slope = 0.0;
  std::vector<double> ratios;
};

std::vector<SmoothingResult> verify_smoothing(const Propagator& prop, const Field& phi,
                                              std::span<const double> times,
                                              std::span<const SmoothingPair> pairs);

struct BallLowerBoundReport {
  std::vector<double> times;
  std::vector<double> scaled_minimum;  // min_{|x| <= t^{1/(2-a)}} S(t)phi t^{N/(2-a)} / ||phi||_1
  double onset = 0.0;
  double constant = 0.0;
  double spread = 0.0;  // (max - min) / mean over the decade
  bool stable = false;
};

/// Throws NotApplicable for phi == 0.
BallLowerBoundReport verify_ball_lower_bound(const Propagator& prop, const Field& phi,
                                             std::span<const double> times, double stability = 0.1);

}  // namespace fujita::kernel_lab
