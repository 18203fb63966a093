#include "fujita/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fujita/error.hpp"

namespace fujita::config {
namespace {

constexpr std::string_view kKeys[] = {
    "blowup.umax",     "boundary",        "data.amplitude",  "data.delta",         "data.kind",
    "data.radius",     "dim",             "grid.L",          "grid.cells",         "kernel.dt",
    "kernel.per_octave", "kernel.pole",   "kernel.t0",       "kernel.t1",          "output.dir",
    "p",               "picard.iterations", "picard.slices", "picard.tau",         "run.guard",
    "seed",            "snapshots.per_decade", "snapshots.t0", "source.scheme",    "sweep.alpha",
    "sweep.p",         "time.dt0",        "time.fixed_dt",   "time.growth",        "time.horizon",
    "time.theta",      "weight.exponent", "weight.kind",
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view key, std::string_view why) {
  throw Error(ErrorKind::ConfigError, fmt::format("{}: {}", key, why));
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

class Reader {
 public:
  explicit Reader(const Document& doc) : doc_(doc) {}

  bool has(std::string_view key) const { return doc_.entries.count(std::string(key)) > 0; }

  const std::string& raw(std::string_view key) const {
    auto it = doc_.entries.find(std::string(key));
    if (it == doc_.entries.end()) fail(key, "missing required key");
    return it->second;
  }

  double real(std::string_view key, double fallback, bool required = false) const {
    if (!has(key)) {
      if (required) fail(key, "missing required key");
      return fallback;
    }
    return parse_real(key, raw(key));
  }

  long integer(std::string_view key, long fallback, bool required = false) const {
    if (!has(key)) {
      if (required) fail(key, "missing required key");
      return fallback;
    }
    const std::string& s = raw(key);
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, fmt::format("'{}' is not an integer", s));
    return v;
  }

  std::vector<double> list(std::string_view key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    std::string_view rest = raw(key);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(parse_real(key, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = raw(key);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(key, fmt::format("'{}' is not true/false", s));
  }

  static double parse_real(std::string_view key, std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail(key, fmt::format("'{}' is not a finite number", s));
    }
    return v;
  }

 private:
  const Document& doc_;
};

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += num(v[i]);
  }
  return out;
}

}  // namespace

std::vector<std::string_view> known_keys() { return {std::begin(kKeys), std::end(kKeys)}; }

Document Document::parse(std::string_view text) {
  Document doc;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ConfigError, fmt::format("line {}: expected key = value", line_no));
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorKind::ConfigError, fmt::format("line {}: empty key", line_no));
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) fail(key, "unknown key");
    if (!doc.entries.emplace(key, value).second) fail(key, "duplicate key");
  }
  return doc;
}

Document Document::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, fmt::format("cannot open config file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Document::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries) out += fmt::format("{} = {}\n", k, v);
  return out;
}

ExperimentConfig from_document(const Document& doc) {
  for (const auto& [k, v] : doc.entries) {
    if (std::find(std::begin(kKeys), std::end(kKeys), k) == std::end(kKeys)) fail(k, "unknown key");
  }
  const Reader r(doc);
  ExperimentConfig cfg;
  evolution::RunConfig& run = cfg.run;

  const std::string& kind = r.raw("weight.kind");
  if (kind != "axis" && kind != "radial") fail("weight.kind", fmt::format("'{}' is neither axis nor radial", kind));
  run.weight.kind = parse_weight_kind(kind);
  run.weight.exponent = r.real("weight.exponent", 0.0, true);
  const long dim = r.integer("dim", 1, true);
  if (dim < 1 || dim > 3) fail("dim", "must be 1, 2 or 3");
  run.weight.dim = static_cast<int>(dim);
  if (!run.weight.admissible()) {
    fail("weight.exponent", fmt::format("{} is inadmissible for {}", run.weight.exponent, run.weight.describe()));
  }

  run.p = r.real("p", run.p);
  run.half_width = r.real("grid.L", run.half_width);
  const long cells = r.integer("grid.cells", run.cells);
  if (cells < 2 || cells % 2 != 0 || cells > (1L << 24)) fail("grid.cells", "must be an even integer in [2, 2^24]");
  run.cells = static_cast<int>(cells);
  run.horizon = r.real("time.horizon", run.horizon);
  run.dt0 = r.real("time.dt0", run.dt0);
  run.theta = r.real("time.theta", run.theta);
  run.growth = r.real("time.growth", run.growth);
  if (!(run.growth >= 0.0)) fail("time.growth", "must be nonnegative");
  run.fixed_dt = r.real("time.fixed_dt", run.fixed_dt);
  run.umax = r.real("blowup.umax", run.umax);

  if (r.has("data.kind")) {
    try {
      run.data.kind = evolution::parse_data_kind(r.raw("data.kind"));
    } catch (const Error&) {
      fail("data.kind", fmt::format("unknown data kind '{}'", r.raw("data.kind")));
    }
  }
  if (r.has("data.amplitude") && r.has("data.delta")) fail("data.delta", "give data.amplitude or data.delta, not both");
  if (r.has("data.delta")) {
    if (run.data.kind != evolution::DataKind::Threshold) fail("data.delta", "only applies to data.kind = threshold");
    run.data.amplitude = r.real("data.delta", 0.0);
  } else {
    run.data.amplitude = r.real("data.amplitude", run.data.amplitude);
  }
  run.data.radius = r.real("data.radius", run.data.radius);

  if (r.has("boundary")) {
    try {
      run.boundary = parse_boundary(r.raw("boundary"));
    } catch (const Error&) {
      fail("boundary", fmt::format("unknown boundary '{}'", r.raw("boundary")));
    }
  }
  const long per_decade = r.integer("snapshots.per_decade", run.per_decade);
  if (per_decade < 1 || per_decade > 1000) fail("snapshots.per_decade", "must lie in [1, 1000]");
  run.per_decade = static_cast<int>(per_decade);
  run.snapshot_t0 = r.real("snapshots.t0", run.snapshot_t0);
  run.guard = r.boolean("run.guard", run.guard);
  if (r.has("source.scheme")) {
    const std::string& s = r.raw("source.scheme");
    if (s == "flow") {
      run.source_euler = false;
    } else if (s == "euler") {
      run.source_euler = true;
    } else {
      fail("source.scheme", fmt::format("'{}' is neither flow nor euler", s));
    }
  }

  if (r.has("seed")) {
    const std::string& s = r.raw("seed");
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cfg.seed);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("seed", fmt::format("'{}' is not an unsigned 64-bit integer", s));
  }
  if (r.has("output.dir")) {
    cfg.output_dir = r.raw("output.dir");
    if (cfg.output_dir.empty()) fail("output.dir", "must not be empty");
  }
  cfg.sweep_p = r.list("sweep.p");
  cfg.sweep_alpha = r.list("sweep.alpha");
  for (double p : cfg.sweep_p) {
    if (!(p > 1.0)) fail("sweep.p", "every entry must exceed 1");
  }
  for (double a : cfg.sweep_alpha) {
    Weight w = run.weight;
    w.exponent = a;
    if (!w.admissible()) fail("sweep.alpha", fmt::format("{} is inadmissible for {}", a, w.describe()));
  }

  cfg.kernel.dt = r.real("kernel.dt", cfg.kernel.dt);
  cfg.kernel.t0 = r.real("kernel.t0", cfg.kernel.t0);
  cfg.kernel.t1 = r.real("kernel.t1", cfg.kernel.t1);
  cfg.kernel.pole = r.real("kernel.pole", cfg.kernel.pole);
  const long per_octave = r.integer("kernel.per_octave", cfg.kernel.per_octave);
  if (per_octave < 1 || per_octave > 64) fail("kernel.per_octave", "must lie in [1, 64]");
  cfg.kernel.per_octave = static_cast<int>(per_octave);
  if (!(cfg.kernel.dt > 0.0)) fail("kernel.dt", "must be positive");
  if (!(cfg.kernel.t0 > 0.0)) fail("kernel.t0", "must be positive");
  if (!(cfg.kernel.t1 >= cfg.kernel.t0)) fail("kernel.t1", "must be at least kernel.t0");
  if (!(std::abs(cfg.kernel.pole) < run.half_width)) fail("kernel.pole", "must lie inside the box");

  const long iterations = r.integer("picard.iterations", cfg.picard.iterations);
  if (iterations < 1 || iterations > 1000) fail("picard.iterations", "must lie in [1, 1000]");
  cfg.picard.iterations = static_cast<int>(iterations);
  const long slices = r.integer("picard.slices", cfg.picard.slices);
  if (slices < 1 || slices > 100000) fail("picard.slices", "must lie in [1, 100000]");
  cfg.picard.slices = static_cast<int>(slices);
  cfg.picard.tau = r.real("picard.tau", cfg.picard.tau);
  if (cfg.picard.tau < 0.0) fail("picard.tau", "must be nonnegative");

  try {
    run.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return cfg;
}

Document to_document(const ExperimentConfig& cfg) {
  const evolution::RunConfig& run = cfg.run;
  Document d;
  auto& e = d.entries;
  e["weight.kind"] = std::string(to_string(run.weight.kind));
  e["weight.exponent"] = num(run.weight.exponent);
  e["dim"] = std::to_string(run.weight.dim);
  e["p"] = num(run.p);
  e["grid.L"] = num(run.half_width);
  e["grid.cells"] = std::to_string(run.cells);
  e["time.horizon"] = num(run.horizon);
  e["time.dt0"] = num(run.dt0);
  e["time.theta"] = num(run.theta);
  e["time.growth"] = num(run.growth);
  e["time.fixed_dt"] = num(run.fixed_dt);
  e["blowup.umax"] = num(run.umax);
  e["data.kind"] = std::string(evolution::to_string(run.data.kind));
  if (run.data.kind == evolution::DataKind::Threshold) {
    e["data.delta"] = num(run.data.amplitude);
  } else {
    e["data.amplitude"] = num(run.data.amplitude);
  }
  e["data.radius"] = num(run.data.radius);
  e["boundary"] = std::string(to_string(run.boundary));
  e["snapshots.per_decade"] = std::to_string(run.per_decade);
  e["snapshots.t0"] = num(run.snapshot_t0);
  e["run.guard"] = run.guard ? "true" : "false";
  e["source.scheme"] = run.source_euler ? "euler" : "flow";
  e["seed"] = std::to_string(cfg.seed);
  e["output.dir"] = cfg.output_dir;
  if (!cfg.sweep_p.empty()) e["sweep.p"] = join(cfg.sweep_p);
  if (!cfg.sweep_alpha.empty()) e["sweep.alpha"] = join(cfg.sweep_alpha);
  e["kernel.dt"] = num(cfg.kernel.dt);
  e["kernel.t0"] = num(cfg.kernel.t0);
  e["kernel.t1"] = num(cfg.kernel.t1);
  e["kernel.per_octave"] = std::to_string(cfg.kernel.per_octave);
  e["kernel.pole"] = num(cfg.kernel.pole);
  e["picard.iterations"] = std::to_string(cfg.picard.iterations);
  e["picard.slices"] = std::to_string(cfg.picard.slices);
  e["picard.tau"] = num(cfg.picard.tau);
  return d;
}

std::string config_hash(const Document& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace fujita::config
