#include "fujita/evolution.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fujita/error.hpp"
#include "fujita/kernels.hpp"
#include "fujita/lorentz.hpp"

namespace fujita::evolution {
namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::string channel_name(double order, bool weak) {
  const std::string q = std::isinf(order) ? "inf" : fmt::format("{:g}", order);
  return weak ? fmt::format("weak_{}", q) : fmt::format("L{}", q);
}

std::vector<double> snapshot_lattice(double t0, double horizon, int per_decade) {
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double t = t0 * std::pow(10.0, static_cast<double>(k) / per_decade);
    if (t > horizon * (1.0 + 1e-12)) break;
    out.push_back(t);
  }
  return out;
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

}  // namespace

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::Bump: return "bump";
    case DataKind::Threshold: return "threshold";
    case DataKind::Constant: return "constant";
    case DataKind::Gaussian: return "gaussian";
    case DataKind::Indicator: return "indicator";
  }
  return "?";
}

DataKind parse_data_kind(std::string_view name) {
  for (DataKind k : {DataKind::Bump, DataKind::Threshold, DataKind::Constant, DataKind::Gaussian,
                     DataKind::Indicator}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::ConfigError, fmt::format("data.kind: unknown data kind '{}'", name));
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::BlowUp: return "BlowUp";
    case OutcomeKind::Global: return "Global";
    case OutcomeKind::HorizonReached: return "HorizonReached";
  }
  return "?";
}

double DataSpec::support_radius() const {
  return (kind == DataKind::Bump || kind == DataKind::Indicator) ? radius : 0.0;
}

double data_value(const DataSpec& spec, std::span<const double> x, double alpha, double p) {
  const double r = norm2(x);
  switch (spec.kind) {
    case DataKind::Bump: {
      const double s = r / spec.radius;
      if (s >= 1.0) return 0.0;
      return spec.amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    case DataKind::Threshold:
      return spec.amplitude / (1.0 + std::pow(r, (2.0 - alpha) / (p - 1.0)));
    case DataKind::Constant:
      return spec.amplitude;
    case DataKind::Gaussian:
      return spec.amplitude * std::exp(-(r * r) / (spec.radius * spec.radius));
    case DataKind::Indicator:
      return r < spec.radius ? spec.amplitude : 0.0;
  }
  return 0.0;
}

Field initial_field(const DataSpec& spec, const Grid& grid, double alpha, double p) {
  if (spec.kind == DataKind::Constant) return Field(grid, spec.amplitude);
  return cell_averages(grid, [&](std::span<const double> x) { return data_value(spec, x, alpha, p); });
}

Field threshold_data(double delta, double alpha, double p, const Grid& grid) {
  return initial_field({DataKind::Threshold, delta, 1.0}, grid, alpha, p);
}

void RunConfig::validate() const {
  weight.require_admissible();
  auto fail = [](std::string_view key, std::string_view why) {
    throw Error(ErrorKind::ConfigError, fmt::format("{}: {}", key, why));
  };
  if (!(p > 1.0)) fail("p", "must exceed 1");
  if (!(half_width > 0.0)) fail("grid.L", "must be positive");
  if (cells < 2 || cells % 2 != 0) fail("grid.cells", "must be an even integer >= 2");
  if (!(horizon > 0.0)) fail("time.horizon", "must be positive");
  if (!(dt0 > 0.0)) fail("time.dt0", "must be positive");
  if (!(theta > 0.0 && theta < 1.0)) fail("time.theta", "must lie in (0, 1)");
  if (!(umax >= 1e6)) fail("blowup.umax", "must be at least 1e6");
  if (per_decade < 1) fail("snapshots.per_decade", "must be positive");
  if (!(snapshot_t0 > 0.0)) fail("snapshots.t0", "must be positive");
  if (!(data.amplitude >= 0.0)) fail("data.amplitude", "must be nonnegative");
  if (!(data.radius > 0.0)) fail("data.radius", "must be positive");
  if (fixed_dt < 0.0) fail("time.fixed_dt", "must be nonnegative");
}

const Channel* RunOutcome::channel(std::string_view name) const {
  for (const Channel& c : channels) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double ladder_dt(double target, double dt0) {
  const double k = std::floor(4.0 * std::log2(target / dt0) + 1e-9);
  return std::min(target, dt0 * std::exp2(k / 4.0));
}

std::shared_ptr<PropagatorCache> make_cache(const RunConfig& config) {
  auto op = std::make_shared<const DiffusionOperator>(config.weight, config.grid(), config.boundary);
  return std::make_shared<PropagatorCache>(op);
}

Stepper::Stepper(const RunConfig& config, std::shared_ptr<PropagatorCache> cache, Field initial)
    : config_(config), cache_(std::move(cache)), u_(std::move(initial)) {
  if (!(u_.grid == cache_->op().grid())) throw Error(ErrorKind::NotApplicable, "data grid differs from operator grid");
  if (kernels::min_value(u_.values) < 0.0) throw Error(ErrorKind::NotApplicable, "initial data must be nonnegative");
}

double Stepper::sup() const { return kernels::max_abs(u_.values); }

double Stepper::cap() const {
  const double s = sup();
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  return config_.theta / (config_.p * std::pow(s, config_.p - 1.0));
}

double Stepper::uncapped_dt() const {
  if (config_.fixed_dt > 0.0) return config_.fixed_dt;
  return ladder_dt(std::max(config_.dt0, config_.growth * t_), config_.dt0);
}

double Stepper::proposed_dt() const {
  double dt = uncapped_dt();
  const double c = cap();
  if (dt > c) dt = ladder_dt(c, config_.dt0);
  return dt;
}

void Stepper::step(double dt) {
  if (dt > cap() * (1.0 + 1e-12)) throw Error(ErrorKind::NotApplicable, "step exceeds the source cap");
  cache_->get(dt)->step(u_.values);
  if (config_.source_euler) {
    kernels::source_euler(u_.values, dt, config_.p);
  } else {
    kernels::source_flow(u_.values, dt, config_.p);
  }
  t_ += dt;
}

RunOutcome run(const RunConfig& config, std::shared_ptr<PropagatorCache> cache) {
  config.validate();
  return run(config, initial_field(config.data, config.grid(), config.weight.exponent, config.p), std::move(cache));
}

RunOutcome run(const RunConfig& config, const Field& initial, std::shared_ptr<PropagatorCache> cache) {
  config.validate();
  if (!cache) cache = make_cache(config);
  Stepper stepper(config, cache, initial);
  RunOutcome out;
  for (double q : config.strong_orders) out.channels.push_back({channel_name(q, false), q, false, {}, {}});
  for (double q : config.weak_orders) out.channels.push_back({channel_name(q, true), q, true, {}, {}});
  out.mass_times.push_back(0.0);
  out.mass.push_back(initial.mass());

  const auto lattice = snapshot_lattice(config.snapshot_t0, config.horizon, config.per_decade);
  std::size_t next = 0;
  auto record = [&] {
    const Field& u = stepper.state();
    const double t = stepper.time();
    for (Channel& c : out.channels) {
      c.times.push_back(t);
      c.values.push_back(c.weak ? lorentz::weak_norm(u, c.order).value : u.norm(c.order));
    }
    out.mass_times.push_back(t);
    out.mass.push_back(u.mass());
    out.snapshot_times.push_back(t);
    if (config.keep_fields) out.snapshots.push_back(u);
  };

  auto blow_up = [&](bool underflow) {
    const double s = stepper.sup();
    out.kind = OutcomeKind::BlowUp;
    out.step_underflow = underflow;
    out.t_lower = stepper.time();
    out.t_upper = stepper.time() + std::pow(s, 1.0 - config.p) / (config.p - 1.0);
    // t is a sum of out.steps rounded increments
    out.t_upper += 4.0 * static_cast<double>(out.steps + 1) * std::numeric_limits<double>::epsilon() * out.t_upper;
    out.t_estimate = out.t_upper;
    out.final_time = stepper.time();
    out.final_field = stepper.state();
    return out;
  };

  while (stepper.time() < config.horizon * (1.0 - 1e-12)) {
    if (stepper.sup() >= config.umax) return blow_up(false);
    double dt = stepper.proposed_dt();
    if (dt < stepper.uncapped_dt()) ++out.cap_limited_steps;
    if (dt < config.dt_min) return blow_up(true);
    dt = std::min(dt, config.horizon - stepper.time());
    if (next < lattice.size()) dt = std::min(dt, lattice[next] - stepper.time());
    stepper.step(dt);
    ++out.steps;
    bool crossed = false;
    while (next < lattice.size() && stepper.time() >= lattice[next] * (1.0 - 1e-12)) {
      crossed = true;
      ++next;
    }
    if (crossed) record();
  }
  if (stepper.sup() >= config.umax) return blow_up(false);
  if (out.snapshot_times.empty() || out.snapshot_times.back() < stepper.time()) record();

  out.final_time = stepper.time();
  out.final_field = stepper.state();
  out.kind = OutcomeKind::HorizonReached;
  if (config.guard) {
    const double a = config.weight.exponent;
    const double need = 8.0 * std::pow(config.horizon, 1.0 / (2.0 - a)) + config.data.support_radius();
    if (config.half_width < need) {
      throw Error(ErrorKind::BoundaryContamination,
                  fmt::format("box half-width {} is below 8 T^(1/(2-a)) + support = {}", config.half_width, need));
    }
    if (config.data.support_radius() > 0.0) {
      const double shell = shell_fraction(out.final_field);
      if (shell > 1e-6) {
        throw Error(ErrorKind::BoundaryContamination,
                    fmt::format("{:.3g} of the mass sits in the outer shell at the horizon", shell));
      }
    }
    out.kind = OutcomeKind::Global;
  }
  return out;
}

double picard_window(double p, double linear_constant, double data_sup) {
  return 1.0 / (2.0 * p * std::pow(2.0 * linear_constant * data_sup, p - 1.0));
}

PicardResult picard_iterate(const RunConfig& config, int n_max, double tau, int slices) {
  config.validate();
  if (n_max < 1 || slices < 1) throw Error(ErrorKind::NotApplicable, "need at least one iterate and one slice");
  const Grid grid = config.grid();
  const Field phi = initial_field(config.data, grid, config.weight.exponent, config.p);
  auto cache = make_cache(config);
  PicardResult res;
  res.data_sup = phi.max_abs();

  auto linear_slices = [&](double window) {
    const double d = window / slices;
    auto prop = cache->get(d);
    std::vector<Field> lin{phi};
    for (int k = 1; k <= slices; ++k) {
      Field next = lin.back();
      prop->step(next.values);
      lin.push_back(std::move(next));
    }
    return lin;
  };

  if (!(res.data_sup > 0.0)) {
    res.tau = tau > 0.0 ? tau : config.horizon;
    res.slice = res.tau / slices;
    for (int k = 0; k <= slices; ++k) res.times.push_back(k * res.slice);
    res.iterates.assign(n_max, std::vector<Field>(slices + 1, phi));
    return res;
  }

  // c_* from the linear flow over the provisional window with c = 1
  std::vector<Field> u1 = linear_slices(tau > 0.0 ? tau : picard_window(config.p, 1.0, res.data_sup));
  for (const Field& f : u1) res.linear_constant = std::max(res.linear_constant, f.max_abs() / res.data_sup);
  res.tau = tau > 0.0 ? tau : picard_window(config.p, res.linear_constant, res.data_sup);
  u1 = linear_slices(res.tau);
  res.slice = res.tau / slices;
  for (int k = 0; k <= slices; ++k) res.times.push_back(k * res.slice);

  auto prop = cache->get(res.slice);
  const double half = 0.5 * res.slice;
  const std::size_t n = grid.size();
  res.iterates.push_back(u1);
  for (const Field& f : u1) res.sup_iterate = std::max(res.sup_iterate, f.max_abs());
  for (int it = 1; it < n_max; ++it) {
    const std::vector<Field>& prev = res.iterates.back();
    std::vector<Field> next;
    next.reserve(slices + 1);
    std::vector<double> integral(n, 0.0), g_prev(n), g_cur(n);
    kernels::pow_abs(prev[0].values, config.p, g_prev);
    next.push_back(u1[0]);
    for (int k = 1; k <= slices; ++k) {
      kernels::pow_abs(prev[k].values, config.p, g_cur);
      kernels::axpby(1.0, integral, half, g_prev, integral);
      prop->step(integral);
      kernels::axpby(1.0, integral, half, g_cur, integral);
      Field u(grid);
      kernels::axpby(1.0, u1[k].values, 1.0, integral, u.values);
      const double s = u.max_abs();
      if (!(s <= config.umax)) {
        throw Error(ErrorKind::IterateOverflow, fmt::format("iterate {} reaches {} at t = {}", it + 1, s, res.times[k]));
      }
      res.sup_iterate = std::max(res.sup_iterate, s);
      for (std::size_t i = 0; i < n; ++i) {
        res.max_monotonicity_violation = std::max(res.max_monotonicity_violation, prev[k].values[i] - u.values[i]);
      }
      next.push_back(std::move(u));
      std::swap(g_prev, g_cur);
    }
    res.iterates.push_back(std::move(next));
  }
  return res;
}

std::vector<Field> stepped_on_lattice(const RunConfig& config, double tau, int slices) {
  config.validate();
  const Grid grid = config.grid();
  auto cache = make_cache(config);
  Stepper stepper(config, cache, initial_field(config.data, grid, config.weight.exponent, config.p));
  const double d = tau / slices;
  std::vector<Field> out{stepper.state()};
  for (int k = 1; k <= slices; ++k) {
    stepper.step(d);
    out.push_back(stepper.state());
  }
  return out;
}

StabilityResult stability_check(const RunConfig& config, const Field& phi1, const Field& phi2, double sigma) {
  config.validate();
  auto cache = make_cache(config);
  Stepper s1(config, cache, phi1);
  Stepper s2(config, cache, phi2);
  StabilityResult res;
  const double denom = kernels::max_abs_diff(phi1.values, phi2.values);
  if (!(denom > 0.0)) {
    res.times.push_back(0.0);
    res.ratios.push_back(0.0);
    return res;
  }
  double running = 0.0;
  while (s1.time() < sigma * (1.0 - 1e-12)) {
    if (s1.sup() >= config.umax || s2.sup() >= config.umax) {
      throw Error(ErrorKind::NotApplicable, fmt::format("a run blows up before sigma = {}", sigma));
    }
    double dt = std::min(s1.proposed_dt(), s2.proposed_dt());
    if (dt < config.dt_min) throw Error(ErrorKind::NotApplicable, "step underflow before sigma");
    dt = std::min(dt, sigma - s1.time());
    s1.step(dt);
    s2.step(dt);
    running = std::max(running, kernels::max_abs_diff(s1.state().values, s2.state().values) / denom);
    res.times.push_back(s1.time());
    res.ratios.push_back(running);
  }
  res.ratio = running;
  return res;
}

ScalingResult scaling_covariance_check(const RunConfig& config, double lambda, int snapshots) {
  config.validate();
  if (!(lambda >= 0.25 && lambda <= 4.0)) throw Error(ErrorKind::NotApplicable, "lambda must lie in [1/4, 4]");
  ScalingResult res;
  res.lambda = lambda;
  const double a = config.weight.exponent;
  res.alpha = (2.0 - a) / (config.p - 1.0);

  RunConfig base = config;
  base.half_width = lambda * config.half_width;
  base.cells = 2 * static_cast<int>(std::lround(0.5 * lambda * config.cells));
  RunConfig scaled = config;
  const double dt_base = config.fixed_dt > 0.0 ? config.fixed_dt : config.dt0;
  const double time_factor = std::pow(lambda, 2.0 - a);
  base.fixed_dt = dt_base;
  scaled.fixed_dt = dt_base / time_factor;

  const Grid base_grid = base.grid();
  const Grid scaled_grid = scaled.grid();
  const Field phi = initial_field(config.data, base_grid, a, config.p);
  const double amp = std::pow(lambda, res.alpha);
  const Field phi_lambda = cell_averages(scaled_grid, [&](std::span<const double> x) {
    std::array<double, 3> y{};
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = lambda * x[i];
    return amp * data_value(config.data, std::span<const double>(y.data(), x.size()), a, config.p);
  });

  Stepper sb(base, make_cache(base), phi);
  Stepper ss(scaled, make_cache(scaled), phi_lambda);
  const long total = std::max(1L, std::lround(config.horizon / dt_base));
  long done = 0;
  for (int j = 1; j <= snapshots; ++j) {
    const long target = total * j / snapshots;
    for (; done < target; ++done) {
      if (dt_base > sb.cap() || scaled.fixed_dt > ss.cap()) {
        throw Error(ErrorKind::NotApplicable, "fixed step exceeds the source cap");
      }
      sb.step(dt_base);
      ss.step(scaled.fixed_dt);
    }
    const Field& us = ss.state();
    double worst = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
      auto x = scaled_grid.center_point(i);
      for (double& v : x) v *= lambda;
      worst = std::max(worst, std::abs(amp * sb.state().interpolate(x) - us.values[i]));
    }
    const double dev = worst / us.max_abs();
    res.times.push_back(ss.time());
    res.deviations.push_back(dev);
    res.deviation = std::max(res.deviation, dev);
  }
  return res;
}

}  // namespace fujita::evolution
