#include "fujita/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fujita/error.hpp"
#include "fujita/kernels.hpp"
#include "fujita/propagator.hpp"

namespace fujita::experiments {

using evolution::OutcomeKind;
using evolution::RunConfig;

double critical_exponent(double alpha, int n) { return 1.0 + (2.0 - alpha) / n; }

ExponentTable ExponentTable::make(double alpha, int n, double p) {
  ExponentTable t;
  t.alpha = alpha;
  t.n = n;
  t.p = p;
  t.p_star = critical_exponent(alpha, n);
  t.r_star = n * (p - 1.0) / (2.0 - alpha);
  return t;
}

double ExponentTable::decay(double q) const {
  if (std::isinf(q)) return 1.0 / (p - 1.0);
  return (n / (2.0 - alpha)) * (1.0 / r_star - 1.0 / q);
}

std::string_view to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent: return "Consistent";
    case Consistency::Inconsistent: return "Inconsistent";
    case Consistency::Undecided: return "Undecided";
    case Consistency::ConsistentWithSmallnessHypothesis: return "ConsistentWithSmallnessHypothesis";
  }
  return "?";
}

PhasePoint classify(const RunConfig& config, const ClassifyOptions& options) {
  PhasePoint pt;
  pt.p = config.p;
  pt.alpha = config.weight.exponent;
  pt.n = config.weight.dim;
  pt.amplitude = config.data.amplitude;
  pt.table = ExponentTable::make(pt.alpha, pt.n, pt.p);

  RunConfig cfg = config;
  cfg.strong_orders = {std::numeric_limits<double>::infinity()};
  cfg.weak_orders.clear();
  if (pt.table.r_star >= 1.0) cfg.weak_orders.push_back(pt.table.r_star);
  const evolution::RunOutcome out = evolution::run(cfg);
  pt.outcome = out.kind;

  if (out.kind == OutcomeKind::BlowUp) {
    pt.t_blowup_lo = out.t_lower;
    pt.t_blowup_hi = out.t_upper;
    pt.consistency = pt.table.supercritical() ? Consistency::ConsistentWithSmallnessHypothesis
                                              : Consistency::Consistent;
    return pt;
  }

  const fit::Window last_decade{cfg.horizon / 10.0, 0.0};
  const fit::DecayFitOptions fit_options{.min_points = 8, .min_decades = 1.0, .floor = 0.0};
  auto try_fit = [&](std::string_view name) -> std::optional<fit::DecayFit> {
    const evolution::Channel* c = out.channel(name);
    if (!c) return std::nullopt;
    try {
      return fit::decay_fit(c->times, c->values, last_decade, fit_options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientWindow) throw;
      return std::nullopt;
    }
  };
  pt.slope_inf = try_fit("Linf");
  if (pt.table.r_star >= 1.0) {
    pt.slope_weak_rstar = try_fit(out.channels.size() > 1 ? out.channels[1].name : "");
  }

  if (!pt.table.supercritical()) {
    // blow-up may lie beyond any affordable horizon
    pt.consistency = Consistency::Undecided;
    return pt;
  }
  if (!pt.slope_inf) {
    pt.consistency = Consistency::Undecided;
    return pt;
  }
  const double expected = -pt.table.decay(std::numeric_limits<double>::infinity());
  pt.consistency = pt.slope_inf->slope <= expected * (1.0 - options.tolerance) ? Consistency::Consistent
                                                                              : Consistency::Inconsistent;
  return pt;
}

DeltaSearch search_global_delta(const RunConfig& config, int max_halvings) {
  DeltaSearch s;
  RunConfig cfg = config;
  for (s.halvings = 0; s.halvings <= max_halvings; ++s.halvings) {
    s.delta = cfg.data.amplitude;
    s.outcome = evolution::run(cfg);
    if (s.outcome.kind != OutcomeKind::BlowUp) return s;
    cfg.data.amplitude *= 0.5;
  }
  throw Error(ErrorKind::NotApplicable,
              fmt::format("still blowing up after {} halvings (amplitude {})", max_halvings, s.delta));
}

AkConstant ak_constant(double p, int j_max) {
  if (!(p > 1.0)) throw Error(ErrorKind::NotApplicable, "ak_constant needs p > 1");
  AkConstant ak;
  double comparison = 0.0;
  const double lp = std::log(p);
  for (int j = 0; j <= j_max; ++j) {
    const double weight = std::pow(p, -(j + 1.0));
    // (p^{j+1} - 1) / (p - 1) = 1 + p + ... + p^j
    const double factor = std::expm1((j + 1.0) * lp) / std::expm1(lp);
    ak.log_product += weight * std::log(factor);
    ak.partial_products.push_back(std::exp(ak.log_product));
    comparison += weight * (std::log(j + 1.0) + j * lp);
  }
  ak.product = ak.partial_products.back();

  // factor <= (j+1) p^j, and the comparison terms c_j = p^{-j-1}(log(j+1) + j log p)
  // have ratios c_{j+1}/c_j bounded by rho for j > j_max
  const int j0 = j_max + 1;
  auto term = [&](int j) { return std::pow(p, -(j + 1.0)) * (std::log(j + 1.0) + j * lp); };
  const double rho = (1.0 / p) * (1.0 + (std::log((j0 + 2.0) / (j0 + 1.0)) + lp) / (std::log(j0 + 1.0) + j0 * lp));
  double log_tail = std::numeric_limits<double>::infinity();
  if (rho < 1.0) log_tail = term(j0) / (1.0 - rho);
  ak.tail_bound = ak.product * std::expm1(log_tail);
  ak.comparison_bound = std::exp(comparison + log_tail);
  return ak;
}

std::vector<double> linear_sup_series(const RunConfig& config, std::span<const double> times, int substeps) {
  config.validate();
  auto cache = evolution::make_cache(config);
  Field u = evolution::initial_field(config.data, config.grid(), config.weight.exponent, config.p);
  std::vector<double> out;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw Error(ErrorKind::NotApplicable, "times must be increasing");
    if (target > t) {
      cache->get((target - t) / substeps)->advance(u.values, substeps);
      t = target;
    }
    out.push_back(u.max_abs());
  }
  return out;
}

Lemma31Report lemma31_functional(std::span<const double> times, std::span<const double> sup_norms, double p,
                                 double alpha, int n, fit::Window window) {
  Lemma31Report r;
  r.expected_slope = 1.0 / (p - 1.0) - n / (2.0 - alpha);
  for (std::size_t i = 0; i < std::min(times.size(), sup_norms.size()); ++i) {
    if (!(times[i] > 0.0)) continue;
    const double v = std::pow(times[i], 1.0 / (p - 1.0)) * sup_norms[i];
    r.times.push_back(times[i]);
    r.values.push_back(v);
    if (v > r.sup_value) {
      r.sup_value = v;
      r.sup_time = times[i];
    }
  }
  r.slope = fit::decay_fit(r.times, r.values, window, {.min_points = 8, .min_decades = 1.0, .floor = 0.0});
  return r;
}

MassGrowthReport critical_mass_growth(const RunConfig& config, double window_end, bool require_critical) {
  const double alpha = config.weight.exponent;
  const int n = config.weight.dim;
  if (require_critical && std::abs(config.p - critical_exponent(alpha, n)) > 1e-12) {
    throw Error(ErrorKind::NotApplicable, fmt::format("p = {} is not the critical exponent {}", config.p,
                                                      critical_exponent(alpha, n)));
  }
  if (!(config.data.amplitude > 0.0)) throw Error(ErrorKind::NotApplicable, "trivial data");
  RunConfig cfg = config;
  cfg.guard = false;
  cfg.boundary = Boundary::Reflecting;
  const evolution::RunOutcome out = evolution::run(cfg);

  MassGrowthReport rep;
  rep.outcome = out.kind;
  rep.times = out.mass_times;
  rep.mass = out.mass;
  rep.t_end = window_end > 0.0 ? window_end : out.snapshot_times.empty() ? 0.0 : out.snapshot_times.back();
  rep.t_hi = rep.t_end;
  rep.t_lo = rep.t_end / 10.0;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double t = rep.times[i];
    if (t >= rep.t_lo * (1 - 1e-12) && t <= rep.t_hi * (1 + 1e-12) && t > 0.0) {
      x.push_back(std::log10(t));
      y.push_back(rep.mass[i]);
    }
  }
  rep.points = x.size();
  if (x.size() < 8) {
    throw Error(ErrorKind::InsufficientWindow,
                fmt::format("{} mass samples in [{}, {}]; need 8", x.size(), rep.t_lo, rep.t_hi));
  }
  const fit::LinearFit lf = fit::least_squares(x, y);
  rep.slope = lf.slope;
  rep.relative_residual = lf.slope != 0.0 ? lf.residual_rms / std::abs(lf.slope) : std::numeric_limits<double>::infinity();
  return rep;
}

std::vector<PhasePoint> sweep(const RunConfig& base, std::span<const double> p_grid,
                              std::span<const double> alpha_grid, int jobs, const ClassifyOptions& options) {
  const std::size_t np = p_grid.size();
  const std::size_t total = np * alpha_grid.size();
  std::vector<PhasePoint> rows(total);
  const int threads = std::max(1, jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t k = 0; k < total; ++k) {
    RunConfig cfg = base;
    cfg.p = p_grid[k % np];
    cfg.weight.exponent = alpha_grid[k / np];
    PhasePoint& row = rows[k];
    try {
      row = classify(cfg, options);
    } catch (const std::exception& e) {
      row = PhasePoint{};
      row.p = cfg.p;
      row.alpha = cfg.weight.exponent;
      row.n = cfg.weight.dim;
      row.amplitude = cfg.data.amplitude;
      row.table = ExponentTable::make(row.alpha, row.n, row.p);
      row.error = e.what();
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const PhasePoint> rows) {
  out << "p,alpha,N,p_star,r_star,outcome,t_blowup_lo,t_blowup_hi,slope_inf,slope_weak_rstar,consistency\n";
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  for (const PhasePoint& r : rows) {
    std::string outcome;
    std::string consistency;
    if (!r.error.empty()) {
      outcome = "Error";
      consistency = "Error";
    } else {
      outcome = std::string(evolution::to_string(*r.outcome));
      consistency = std::string(to_string(r.consistency));
    }
    const bool blew = r.outcome && *r.outcome == OutcomeKind::BlowUp;
    out << num(r.p) << ',' << num(r.alpha) << ',' << r.n << ',' << num(r.table.p_star) << ','
        << num(r.table.r_star) << ',' << outcome << ',' << (blew ? num(r.t_blowup_lo) : "") << ','
        << (blew ? num(r.t_blowup_hi) : "") << ',' << (r.slope_inf ? num(r.slope_inf->slope) : "") << ','
        << (r.slope_weak_rstar ? num(r.slope_weak_rstar->slope) : "") << ',' << consistency << '\n';
  }
}

}  // namespace fujita::experiments
