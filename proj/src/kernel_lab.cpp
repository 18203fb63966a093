#include "fujita/kernel_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fujita/error.hpp"
#include "fujita/fit.hpp"
#include "fujita/geometry.hpp"
#include "fujita/kernels.hpp"
#include "fujita/lorentz.hpp"

namespace fujita::kernel_lab {
namespace {

std::vector<long> snap_steps(double dt, std::span<const double> times) {
  std::vector<long> steps;
  for (double t : times) steps.push_back(std::max(0L, std::lround(t / dt)));
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i] < steps[i - 1]) throw Error(ErrorKind::NotApplicable, "snapshot times must be sorted");
  }
  return steps;
}

double shell_fraction(const Field& f) {
  double shell = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::abs(f.values[i]);
    total += v;
    if (f.grid.in_outer_shell(i, 0.1)) shell += v;
  }
  return total > 0.0 ? shell / total : 0.0;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::vector<double> geometric_times(double t0, double t1, int per_octave) {
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double t = t0 * std::exp2(static_cast<double>(k) / per_octave);
    if (t > t1 * (1.0 + 1e-12)) break;
    out.push_back(t);
  }
  return out;
}

Field discrete_delta(const Grid& grid, std::span<const double> y) {
  const auto cells = grid.cells_touching(y);
  if (cells.empty()) throw Error(ErrorKind::NotApplicable, "pole lies outside the grid");
  Field delta(grid);
  const double v = 1.0 / (static_cast<double>(cells.size()) * grid.cell_measure());
  for (std::size_t c : cells) delta.values[c] = v;
  return delta;
}

std::vector<Field> evolve_snapshots(const Propagator& prop, const Field& phi, std::span<const double> times) {
  const auto steps = snap_steps(prop.dt(), times);
  std::vector<Field> out;
  Field state = phi;
  long done = 0;
  for (long target : steps) {
    prop.advance(state.values, target - done);
    done = target;
    out.push_back(state);
  }
  return out;
}

KernelEstimate estimate_kernel(const Propagator& prop, std::span<const double> y,
                               std::span<const double> times, bool guard) {
  KernelEstimate k;
  k.source.assign(y.begin(), y.end());
  k.steps = snap_steps(prop.dt(), times);
  for (long s : k.steps) k.times.push_back(static_cast<double>(s) * prop.dt());
  k.fields = evolve_snapshots(prop, discrete_delta(prop.grid(), y), k.times);
  for (const Field& f : k.fields) {
    k.mass_errors.push_back(std::abs(f.mass() - 1.0));
    if (guard) {
      const double shell = shell_fraction(f);
      if (shell > 1e-6) {
        throw Error(ErrorKind::BoundaryContamination,
                    fmt::format("{:.3g} of the kernel mass reaches the outer shell by t = {}", shell,
                                static_cast<double>(k.steps[&f - k.fields.data()]) * prop.dt()));
      }
    }
  }
  return k;
}

double gaussian_deviation(const KernelEstimate& kernel, double radius_factor) {
  double worst = 0.0;
  for (std::size_t k = 0; k < kernel.fields.size(); ++k) {
    const Field& f = kernel.fields[k];
    const double t = kernel.times[k];
    if (!(t > 0.0)) continue;
    const double norm = std::pow(4.0 * M_PI * t, -0.5 * f.grid.dim);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double d = distance(f.grid.center_point(i), kernel.source);
      if (d > radius_factor * std::sqrt(t)) continue;
      const double exact = norm * std::exp(-d * d / (4.0 * t));
      worst = std::max(worst, std::abs(f.values[i] - exact) / exact);
    }
  }
  return worst;
}

AxiomReport verify_k_axioms(const Propagator& prop, const KernelEstimate& kernel, std::size_t s_index,
                            std::size_t t_index) {
  if (!(s_index < t_index && t_index < kernel.fields.size())) {
    throw Error(ErrorKind::NotApplicable, "need snapshot indices s < t");
  }
  AxiomReport r;
  r.s = kernel.times[s_index];
  r.t = kernel.times[t_index];
  const Grid& grid = prop.grid();
  for (double e : kernel.mass_errors) r.mass_error = std::max(r.mass_error, e);
  const Field& gamma_t = kernel.fields[t_index];
  const double peak = gamma_t.max_abs();
  const long remaining = kernel.steps[t_index] - kernel.steps[s_index];

  Field restarted = kernel.fields[s_index];
  prop.advance(restarted.values, remaining);
  r.restart_deviation = kernels::max_abs_diff(restarted.values, gamma_t.values) / peak;

  // evaluation points: the pole and cells spaced along the first axis
  const auto pole_cells = grid.cells_touching(kernel.source);
  const std::size_t pole = pole_cells.front();
  std::vector<std::size_t> points;
  const auto pm = grid.unflatten(pole);
  for (int k = -2; k <= 2; ++k) {
    auto m = pm;
    m[0] = std::clamp(pm[0] + k * std::max(1, grid.cells / 16), 0, grid.cells - 1);
    points.push_back(grid.flatten(std::span<const int>(m.data(), grid.dim)));
  }
  const double cell = grid.cell_measure();
  for (std::size_t x : points) {
    const auto xc = grid.center_point(x);
    Field from_x = discrete_delta(grid, xc);
    Field gamma_x_ts = from_x;
    prop.advance(gamma_x_ts.values, remaining);
    double composed = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      composed += gamma_x_ts.values[i] * kernel.fields[s_index].values[i];
    }
    composed *= cell;
    r.composition_deviation = std::max(r.composition_deviation, std::abs(composed - gamma_t.values[x]) / peak);

    Field gamma_x_t = from_x;
    prop.advance(gamma_x_t.values, kernel.steps[t_index]);
    const double reverse = gamma_x_t.sample(kernel.source);
    r.symmetry_deviation = std::max(r.symmetry_deviation, std::abs(reverse - gamma_t.values[x]) / peak);
  }
  const bool conserving = prop.op().boundary() == Boundary::Reflecting;
  r.pass = (!conserving || r.mass_error <= 1e-10) && r.restart_deviation <= 1e-12 &&
           r.composition_deviation <= 1e-12 && r.symmetry_deviation <= 1e-10;
  return r;
}

SandwichReport verify_k3_sandwich(const Weight& w, const KernelEstimate& kernel, const SandwichOptions& options) {
  SandwichReport report;
  const double alpha = w.exponent;
  const int n_dim = w.dim;
  const double y_offset = w.singular_distance(kernel.source);
  report.expected_diagonal_slope = -n_dim / (2.0 - alpha);

  std::vector<double> gz, gl, rz, ru, rl;
  std::vector<double> diag;
  const bool refined = w.kind == WeightKind::AxisPower;
  for (std::size_t k = 0; k < kernel.fields.size(); ++k) {
    const Field& f = kernel.fields[k];
    const double t = kernel.times[k];
    if (!(t > 0.0)) continue;
    diag.push_back(f.sample(kernel.source));
    const double peak = f.max_abs();
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!(f.values[i] >= options.peak_fraction * peak) || f.values[i] <= 0.0) continue;
      const double d = distance(f.grid.center_point(i), kernel.source);
      if (std::pow(d, 2.0 - alpha) / t > std::pow(options.distance_bound, 1.0 - alpha)) continue;
      eligible.push_back(i);
    }
    const std::size_t stride = std::max<std::size_t>(1, eligible.size() / options.max_samples_per_time);
    const double hy_inv = geometry::h_inverse_at_offset(w, y_offset, t, 1e-8);
    for (std::size_t e = 0; e < eligible.size(); e += stride) {
      const std::size_t i = eligible[e];
      const auto x = f.grid.center_point(i);
      const double d = distance(x, kernel.source);
      const double x_offset = w.singular_distance(x);
      const double log_gamma = std::log(f.values[i]);

      const double hx = d > 0.0 ? geometry::h_at_offset(w, x_offset, d) : 0.0;
      const double hx_inv = geometry::h_inverse_at_offset(w, x_offset, t, 1e-8);
      const double prefactor = std::pow(hx_inv, -n_dim) + std::pow(hy_inv, -n_dim);
      gz.push_back(std::pow(hx / t, 1.0 / (1.0 - alpha)));
      gl.push_back(log_gamma - std::log(prefactor));

      if (refined) {
        const double tpow = std::pow(t, -0.5 * alpha * n_dim / (2.0 - alpha));
        const double xs = std::pow(std::abs(x[0]), -0.5 * alpha * n_dim);
        const double ys = std::pow(std::abs(kernel.source[0]), -0.5 * alpha * n_dim);
        const double bracket = alpha >= 0.0 ? std::min(xs, tpow) + std::min(ys, tpow)
                                            : std::max(xs, tpow) + std::max(ys, tpow);
        const double outer = std::pow(t, -n_dim / (2.0 - alpha));
        const double inner = bracket * std::pow(t, -0.5 * n_dim);
        const double upper_pref = alpha >= 0.0 ? outer : inner;
        const double lower_pref = alpha >= 0.0 ? inner : outer;
        rz.push_back(std::pow(std::pow(d, 2.0 - alpha) / t, 1.0 / (1.0 - alpha)));
        ru.push_back(log_gamma - std::log(upper_pref));
        rl.push_back(log_gamma - std::log(lower_pref));
      }
    }
  }
  const double max_rate = 50.0;
  if (!gz.empty()) {
    const auto e = fit::chebyshev_envelope(gz, gl, max_rate);
    report.general = {std::exp(e.upper_offset), std::exp(e.lower_offset), e.rate, e.rate, gz.size()};
  }
  if (refined && !rz.empty()) {
    const auto up = fit::chebyshev_envelope(rz, ru, max_rate);
    const auto lo = fit::chebyshev_envelope(rz, rl, max_rate);
    report.refined = {std::exp(up.upper_offset), std::exp(lo.lower_offset), up.rate, lo.rate, rz.size()};
  }
  auto finite_pair = [](const EnvelopeConstants& c) {
    return c.samples == 0 || (std::isfinite(c.upper) && std::isfinite(c.lower) && c.upper > 0 && c.lower > 0);
  };
  if (!finite_pair(report.general) || !finite_pair(report.refined) || gz.empty()) {
    throw Error(ErrorKind::SandwichViolation, "no finite two-sided kernel envelope fits the sample");
  }

  std::vector<double> times;
  for (double t : kernel.times) {
    if (t > 0.0) times.push_back(t);
  }
  report.diagonal_slope = fit::least_squares(
      [&] {
        std::vector<double> v;
        for (double t : times) v.push_back(std::log(t));
        return v;
      }(),
      [&] {
        std::vector<double> v;
        for (double g : diag) v.push_back(std::log(g));
        return v;
      }()).slope;

  report.pass = true;
  for (double r : {2.0, std::numeric_limits<double>::infinity()}) {
    std::vector<double> norms;
    for (std::size_t k = 0; k < kernel.fields.size(); ++k) {
      if (kernel.times[k] > 0.0) norms.push_back(kernel.fields[k].norm(r));
    }
    NormSlope ns;
    ns.r = r;
    ns.expected = -(n_dim / (2.0 - alpha)) * (1.0 - (std::isinf(r) ? 0.0 : 1.0 / r));
    ns.slope = fit::decay_fit(times, norms, {}, {.min_points = 4, .min_decades = 0.5}).slope;
    ns.pass = std::abs(ns.slope - ns.expected) <= options.slope_tolerance * std::abs(ns.expected);
    report.pass = report.pass && ns.pass;
    report.norm_slopes.push_back(ns);
  }
  return report;
}

std::vector<SmoothingResult> verify_smoothing(const Propagator& prop, const Field& phi,
                                              std::span<const double> times,
                                              std::span<const SmoothingPair> pairs) {
  const auto snapshots = evolve_snapshots(prop, phi, times);
  const auto steps = snap_steps(prop.dt(), times);
  const Weight& w = prop.op().weight();
  std::vector<SmoothingResult> out;
  for (const SmoothingPair& pair : pairs) {
    SmoothingResult res;
    res.pair = pair;
    const double q_inv = std::isinf(pair.q) ? 0.0 : 1.0 / pair.q;
    const double r_inv = std::isinf(pair.r) ? 0.0 : 1.0 / pair.r;
    res.theta = (w.dim / (2.0 - w.exponent)) * (q_inv - r_inv);
    auto norm = [&](const Field& f, double e) {
      return pair.weak ? lorentz::weak_norm(f, e).value : f.norm(e);
    };
    const double data_norm = norm(phi, pair.q);
    std::vector<double> lt, ln;
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
      const double t = static_cast<double>(steps[k]) * prop.dt();
      if (!(t > 0.0)) continue;
      const double value = norm(snapshots[k], pair.r);
      const double ratio = value * std::pow(t, res.theta) / data_norm;
      res.ratios.push_back(ratio);
      res.max_ratio = std::max(res.max_ratio, ratio);
      res.last_ratio = ratio;
      lt.push_back(std::log(t));
      ln.push_back(std::log(value));
    }
    res.slope = fit::least_squares(lt, ln).slope;
    out.push_back(std::move(res));
  }
  return out;
}

BallLowerBoundReport verify_ball_lower_bound(const Propagator& prop, const Field& phi,
                                             std::span<const double> times, double stability) {
  const double mass = phi.norm(1.0);
  if (!(mass > 0.0)) throw Error(ErrorKind::NotApplicable, "trivial data has no lower bound");
  const Weight& w = prop.op().weight();
  const double alpha = w.exponent;
  const auto snapshots = evolve_snapshots(prop, phi, times);
  const auto steps = snap_steps(prop.dt(), times);
  BallLowerBoundReport rep;
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const double t = static_cast<double>(steps[k]) * prop.dt();
    if (!(t > 0.0)) continue;
    const double radius = std::pow(t, 1.0 / (2.0 - alpha));
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < snapshots[k].size(); ++i) {
      if (phi.grid.center_norm(i) <= radius) m = std::min(m, snapshots[k].values[i]);
    }
    if (!std::isfinite(m)) continue;
    rep.times.push_back(t);
    rep.scaled_minimum.push_back(m * std::pow(t, w.dim / (2.0 - alpha)) / mass);
  }
  for (std::size_t start = 0; start < rep.times.size(); ++start) {
    std::size_t end = start;
    while (end + 1 < rep.times.size() && rep.times[end + 1] <= 10.0 * rep.times[start] * (1 + 1e-9)) ++end;
    if (rep.times.back() < 10.0 * rep.times[start] * (1 - 1e-9)) break;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0;
    for (std::size_t k = start; k <= end; ++k) {
      lo = std::min(lo, rep.scaled_minimum[k]);
      hi = std::max(hi, rep.scaled_minimum[k]);
      mean += rep.scaled_minimum[k];
    }
    mean /= static_cast<double>(end - start + 1);
    rep.onset = rep.times[start];
    rep.constant = lo;
    rep.spread = (hi - lo) / mean;
    if (rep.spread <= 2.0 * stability && lo > 0.0) {
      rep.stable = true;
      break;
    }
  }
  return rep;
}

}  // namespace fujita::kernel_lab
