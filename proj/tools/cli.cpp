#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fujita/config.hpp"
#include "fujita/error.hpp"
#include "fujita/evolution.hpp"
#include "fujita/experiments.hpp"
#include "fujita/fit.hpp"
#include "fujita/geometry.hpp"
#include "fujita/kernel_lab.hpp"
#include "fujita/kernels.hpp"
#include "fujita/report.hpp"

namespace fujita::cli {
namespace {

namespace fs = std::filesystem;
using report::Json;

struct Options {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  // fit
  std::string series;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t min_points = 8;
  double min_decades = 1.0;
};

struct Context {
  config::ExperimentConfig cfg;
  config::Document doc;
  std::string hash;
  fs::path out;
};

Context load(const Options& o) {
  Context c;
  c.doc = config::Document::load_file(o.config_path);
  if (o.seed) c.doc.entries["seed"] = std::to_string(*o.seed);
  c.cfg = config::from_document(c.doc);
  c.hash = config::config_hash(config::to_document(c.cfg));
  if (o.out) {
    c.out = *o.out;
  } else if (const char* env = std::getenv("FUJITA_LAB_OUT"); env && *env) {
    c.out = env;
  } else {
    c.out = c.cfg.output_dir;
  }
  fs::create_directories(c.out);
  return c;
}

Json manifest(const Context& c, std::string_view command) {
  return {{"command", std::string(command)},
          {"config_hash", c.hash},
          {"weight", report::to_json(c.cfg.run.weight)},
          {"seed", c.cfg.seed}};
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  std::ostringstream s;
  report::write_columns_csv(s, header, columns);
  report::write_text(path, s.str());
}

int weight_check(const Options& o) {
  const Context c = load(o);
  const Weight& w = c.cfg.run.weight;
  geometry::BallSampler sampler;
  sampler.dim = w.dim;
  sampler.seed = c.cfg.seed;

  Json j = manifest(c, "weight-check");
  Json checks = Json::array();
  bool pass = true;

  for (double p_class : {2.0, 1.0 + 2.0 / w.dim}) {
    const double a = geometry::muckenhoupt_constant(w, p_class, sampler);
    const bool ok = std::isfinite(a) && a >= 1.0 - 1e-9;
    pass = pass && ok;
    checks.push_back({{"check", "muckenhoupt"}, {"p_class", p_class}, {"fitted_constants", {{"sup", a}}}, {"pass", ok}});
  }

  const std::vector<double> s_values{1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 13.0, 20.0, 32.0, 50.0, 80.0, 100.0};
  const auto doubling = geometry::doubling_report(w, s_values, sampler);
  pass = pass && doubling.pass;
  checks.push_back(report::to_json(doubling));

  if (w.kind == WeightKind::AxisPower) {
    const auto sample = geometry::lemma21_sample(w, 200, c.cfg.seed);
    const auto env = geometry::verify_lemma21(w, sample);
    pass = pass && env.pass;
    checks.push_back(report::to_json(env));
  }
  j["checks"] = checks;
  j["pass"] = pass;
  report::write_json(c.out / "weight_check.json", j);
  fmt::print("weight-check {}: doubling order {:.4f} (expected {:.4f}) {}\n", w.describe(), doubling.order,
             doubling.expected_order, pass ? "pass" : "FAIL");
  return pass ? kPass : kCheckFailed;
}

int kernel_verify(const Options& o) {
  const Context c = load(o);
  const auto& run = c.cfg.run;
  const auto& ks = c.cfg.kernel;
  const Grid grid = run.grid();
  auto prop = build_propagator(run.weight, grid, ks.dt, Boundary::Reflecting, Scheme::ImplicitEuler);
  std::vector<double> pole(grid.dim, 0.0);
  pole[0] = ks.pole;
  const auto times = kernel_lab::geometric_times(ks.t0, ks.t1, ks.per_octave);
  const auto kernel = kernel_lab::estimate_kernel(*prop, pole, times);

  Json j = manifest(c, "kernel-verify");
  j["y"] = pole;
  j["times"] = kernel.times;
  j["mass_errors"] = kernel.mass_errors;
  bool pass = true;

  const std::size_t t_index = kernel.fields.size() - 1;
  if (t_index >= 1) {
    const std::size_t s_index = t_index >= static_cast<std::size_t>(ks.per_octave) ? t_index - ks.per_octave : 0;
    const auto axioms = kernel_lab::verify_k_axioms(*prop, kernel, s_index, t_index);
    pass = pass && axioms.pass;
    j["axioms"] = report::to_json(axioms);
  }
  if (run.weight.kind == WeightKind::AxisPower || run.weight.exponent == 0.0) {
    try {
      const auto sandwich = kernel_lab::verify_k3_sandwich(run.weight, kernel);
      pass = pass && sandwich.pass;
      j["sandwich"] = report::to_json(sandwich);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientWindow) throw;
      j["sandwich"] = {{"check", "kernel_sandwich"}, {"skipped", e.what()}};
    }
  }
  if (run.weight.exponent == 0.0) {
    const double dev = kernel_lab::gaussian_deviation(kernel);
    const bool ok = dev <= 0.01;
    pass = pass && ok;
    j["gaussian"] = {{"check", "gaussian"}, {"max_relative_deviation", dev}, {"pass", ok}};
  }
  j["pass"] = pass;
  report::write_json(c.out / "kernel.json", j);
  std::ostringstream csv;
  report::write_kernel_csv(csv, kernel);
  report::write_text(c.out / "kernel.csv", csv.str());
  fmt::print("kernel-verify {}: {} snapshots, {}\n", run.weight.describe(), kernel.fields.size(),
             pass ? "pass" : "FAIL");
  return pass ? kPass : kCheckFailed;
}

int simulate(const Options& o) {
  const Context c = load(o);
  evolution::RunConfig run = c.cfg.run;
  const auto table = experiments::ExponentTable::make(run.weight.exponent, run.weight.dim, run.p);
  run.strong_orders = {1.0, std::numeric_limits<double>::infinity()};
  if (table.r_star >= 1.0) run.weak_orders = {table.r_star};
  const auto out = evolution::run(run);

  Json j = manifest(c, "simulate");
  j["p"] = run.p;
  j["p_star"] = table.p_star;
  j["result"] = report::to_json(out);
  report::write_json(c.out / "outcome.json", j);
  for (const auto& ch : out.channels) {
    write_csv(c.out / fmt::format("channel_{}.csv", ch.name), {"t", "value"}, {ch.times, ch.values});
  }
  write_csv(c.out / "mass.csv", {"t", "mass"}, {out.mass_times, out.mass});
  fmt::print("{}\n", report::summary(out));
  return kPass;
}

int sweep(const Options& o) {
  const Context c = load(o);
  if (c.cfg.sweep_p.empty()) throw Error(ErrorKind::ConfigError, "sweep.p: missing required key for sweep");
  if (c.cfg.sweep_alpha.empty()) throw Error(ErrorKind::ConfigError, "sweep.alpha: missing required key for sweep");
  const auto rows = experiments::sweep(c.cfg.run, c.cfg.sweep_p, c.cfg.sweep_alpha, o.jobs);
  std::ostringstream csv;
  experiments::write_sweep_csv(csv, rows);
  report::write_text(c.out / "sweep.csv", csv.str());
  Json j = manifest(c, "sweep");
  Json points = Json::array();
  std::size_t errors = 0;
  for (const auto& r : rows) {
    points.push_back(report::to_json(r));
    if (!r.error.empty()) ++errors;
  }
  j["points"] = points;
  report::write_json(c.out / "sweep.json", j);
  fmt::print("sweep: {} rows, {} errors\n", rows.size(), errors);
  return kPass;
}

int fit_series(const Options& o) {
  std::ifstream in(o.series);
  if (!in) throw Error(ErrorKind::ConfigError, fmt::format("series: cannot open '{}'", o.series));
  std::vector<double> t, v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
      throw Error(ErrorKind::ConfigError, fmt::format("series line {}: expected t,value", line_no));
    }
    try {
      t.push_back(std::stod(a));
      v.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, fmt::format("series line {}: not numeric", line_no));
    }
  }
  const auto f = fit::decay_fit(t, v, {o.t_lo, o.t_hi}, {.min_points = o.min_points, .min_decades = o.min_decades});
  fs::path out = o.out ? fs::path(*o.out) : fs::path(".");
  if (!o.out) {
    if (const char* env = std::getenv("FUJITA_LAB_OUT"); env && *env) out = env;
  }
  Json j = {{"command", "fit"}, {"series", o.series}, {"fit", report::to_json(f)}};
  report::write_json(out / "fit.json", j);
  fmt::print("slope {} +/- {} over [{}, {}] ({} points)\n", report::number(f.slope), report::number(f.halfwidth),
             report::number(f.t_lo), report::number(f.t_hi), f.points);
  return kPass;
}

int picard(const Options& o) {
  const Context c = load(o);
  const auto& run = c.cfg.run;
  const auto& ps = c.cfg.picard;
  const auto res = evolution::picard_iterate(run, ps.iterations, ps.tau, ps.slices);
  const auto stepped = evolution::stepped_on_lattice(run, res.tau, ps.slices);
  std::vector<double> gaps;
  for (const auto& iterate : res.iterates) {
    double g = 0.0;
    for (std::size_t k = 0; k < iterate.size(); ++k) {
      g = std::max(g, kernels::max_abs_diff(iterate[k].values, stepped[k].values));
    }
    gaps.push_back(g);
  }
  const double bound = 2.0 * res.linear_constant * res.data_sup;
  const bool monotone = res.max_monotonicity_violation <= 1e-12;
  const bool bounded = res.sup_iterate <= bound * (1.0 + 1e-12);
  const bool close = gaps.back() <= 1e-3;
  const bool pass = monotone && bounded && close;
  Json j = manifest(c, "picard");
  j["tau"] = res.tau;
  j["slices"] = ps.slices;
  j["linear_constant"] = res.linear_constant;
  j["data_sup"] = res.data_sup;
  j["sup_iterate"] = res.sup_iterate;
  j["bound"] = bound;
  j["max_monotonicity_violation"] = res.max_monotonicity_violation;
  j["gap_to_time_stepped"] = gaps;
  j["pass"] = pass;
  report::write_json(c.out / "picard.json", j);
  fmt::print("picard: tau {:.6g}, {} iterates, gap {:.3g}, sup {:.6g} <= {:.6g}: {}\n", res.tau, res.iterates.size(),
             gaps.back(), res.sup_iterate, bound, pass ? "pass" : "FAIL");
  return pass ? kPass : kCheckFailed;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ConfigError:
    case ErrorKind::InadmissibleWeight:
      return kConfigError;
    default:
      return kRuntimeError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Numerical laboratory for the weighted Fujita problem", "fujita_lab"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value configuration file")->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed override");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* wc = app.add_subcommand("weight-check", "Muckenhoupt, doubling and h_x envelope checks");
  auto* kv = app.add_subcommand("kernel-verify", "discrete fundamental solution checks");
  auto* sim = app.add_subcommand("simulate", "one nonlinear run");
  auto* sw = app.add_subcommand("sweep", "blow-up / global phase diagram");
  auto* pc = app.add_subcommand("picard", "Picard iterates against the time-stepped solution");
  for (auto* s : {wc, kv, sim, sw, pc}) add_common(s);
  auto* ft = app.add_subcommand("fit", "log-log slope of a t,value CSV");
  ft->add_option("series", o.series, "CSV with header t,value")->required();
  ft->add_option("--out", o.out, "output directory");
  ft->add_option("--t-lo", o.t_lo, "window start");
  ft->add_option("--t-hi", o.t_hi, "window end (0: unbounded)");
  ft->add_option("--min-points", o.min_points, "minimum usable points");
  ft->add_option("--min-decades", o.min_decades, "minimum span in decades");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (wc->parsed()) return weight_check(o);
    if (kv->parsed()) return kernel_verify(o);
    if (sim->parsed()) return simulate(o);
    if (sw->parsed()) return sweep(o);
    if (pc->parsed()) return picard(o);
    if (ft->parsed()) return fit_series(o);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace fujita::cli
