#include "fujita/report.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "fujita/error.hpp"

namespace fujita::report {
namespace {

Json envelope_json(const geometry::HEnvelope& e) {
  Json pieces = Json::array();
  for (const auto& p : e.pieces) {
    pieces.push_back({{"min_ratio", p.min_ratio},
                      {"max_ratio", p.max_ratio},
                      {"coefficient", p.coefficient},
                      {"power", p.power},
                      {"offset_power", p.offset_power}});
  }
  return {{"regime", e.regime == geometry::EnvelopeRegime::Upper ? "upper" : "lower"}, {"pieces", pieces}};
}

Json constants_json(const kernel_lab::EnvelopeConstants& c) {
  return {{"upper", c.upper},
          {"lower", c.lower},
          {"upper_rate", c.upper_rate},
          {"lower_rate", c.lower_rate},
          {"samples", c.samples}};
}

// inf is not representable in JSON
Json order_json(double q) { return std::isinf(q) ? Json("inf") : Json(q); }

}  // namespace

std::string number(double v) { return fmt::format("{:.17g}", v); }

Json to_json(const Weight& w) {
  return {{"kind", std::string(to_string(w.kind))}, {"exponent", w.exponent}, {"dim", w.dim}};
}

Json to_json(const fit::DecayFit& f) {
  return {{"slope", f.slope},   {"intercept", f.intercept}, {"t_lo", f.t_lo},
          {"t_hi", f.t_hi},     {"residual", f.residual},   {"halfwidth", f.halfwidth},
          {"points", f.points}};
}

Json to_json(const geometry::DoublingReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) samples.push_back({{"offset", s.offset}, {"radius", s.radius}, {"order", s.order}});
  return {{"check", "doubling"},
          {"order", r.order},
          {"expected_order", r.expected_order},
          {"min_order", r.min_order},
          {"max_order", r.max_order},
          {"fitted_constants", {{"upper", r.upper_constant}, {"lower", r.lower_constant}}},
          {"tolerance", r.tolerance},
          {"samples", samples},
          {"pass", r.pass}};
}

Json to_json(const geometry::EnvelopeReport& r) {
  return {{"check", "h_envelope"},
          {"samples", r.samples.size()},
          {"fitted_constants", {{"upper", envelope_json(r.upper)}, {"lower", envelope_json(r.lower)}}},
          {"worst_ratio", r.worst_ratio},
          {"small_r_power", r.small_r_power},
          {"large_r_power", r.large_r_power},
          {"pass", r.pass}};
}

Json to_json(const kernel_lab::AxiomReport& r) {
  return {{"check", "kernel_axioms"},
          {"s", r.s},
          {"t", r.t},
          {"mass_error", r.mass_error},
          {"restart_deviation", r.restart_deviation},
          {"composition_deviation", r.composition_deviation},
          {"symmetry_deviation", r.symmetry_deviation},
          {"pass", r.pass}};
}

Json to_json(const kernel_lab::SandwichReport& r) {
  Json slopes = Json::array();
  for (const auto& s : r.norm_slopes) {
    slopes.push_back({{"r", order_json(s.r)}, {"slope", s.slope}, {"expected", s.expected}, {"pass", s.pass}});
  }
  return {{"check", "kernel_sandwich"},
          {"general", constants_json(r.general)},
          {"refined", constants_json(r.refined)},
          {"diagonal_slope", r.diagonal_slope},
          {"expected_diagonal_slope", r.expected_diagonal_slope},
          {"norm_slopes", slopes},
          {"pass", r.pass}};
}

Json to_json(const evolution::RunOutcome& r) {
  Json j = {{"outcome", std::string(evolution::to_string(r.kind))},
            {"final_time", r.final_time},
            {"steps", r.steps},
            {"cap_limited_steps", r.cap_limited_steps}};
  if (r.kind == evolution::OutcomeKind::BlowUp) {
    j["t_estimate"] = r.t_estimate;
    j["t_lower"] = r.t_lower;
    j["t_upper"] = r.t_upper;
    j["step_underflow"] = r.step_underflow;
  } else {
    Json channels = Json::array();
    for (const auto& c : r.channels) {
      channels.push_back({{"name", c.name},
                          {"order", order_json(c.order)},
                          {"weak", c.weak},
                          {"points", c.times.size()},
                          {"final", c.values.empty() ? 0.0 : c.values.back()}});
    }
    j["channels"] = channels;
  }
  return j;
}

Json to_json(const experiments::PhasePoint& r) {
  Json j = {{"p", r.p}, {"alpha", r.alpha}, {"N", r.n}, {"p_star", r.table.p_star}, {"r_star", r.table.r_star}};
  if (!r.error.empty()) {
    j["status"] = "error";
    j["error"] = r.error;
    return j;
  }
  j["status"] = "ok";
  j["outcome"] = std::string(evolution::to_string(*r.outcome));
  j["consistency"] = std::string(experiments::to_string(r.consistency));
  if (*r.outcome == evolution::OutcomeKind::BlowUp) {
    j["t_blowup_lo"] = r.t_blowup_lo;
    j["t_blowup_hi"] = r.t_blowup_hi;
  }
  if (r.slope_inf) j["slope_inf"] = to_json(*r.slope_inf);
  if (r.slope_weak_rstar) j["slope_weak_rstar"] = to_json(*r.slope_weak_rstar);
  return j;
}

Json to_json(const experiments::AkConstant& r) {
  return {{"product", r.product},
          {"log_product", r.log_product},
          {"tail_bound", r.tail_bound},
          {"comparison_bound", r.comparison_bound},
          {"terms", r.partial_products.size()}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, fmt::format("cannot write '{}'", path.string()));
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_columns_csv(std::ostream& out, std::span<const std::string> header,
                       std::span<const std::vector<double>> columns) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw Error(ErrorKind::NotApplicable, "CSV columns differ in length");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << number(columns[c][i]);
    out << '\n';
  }
}

void write_kernel_csv(std::ostream& out, const kernel_lab::KernelEstimate& k) {
  if (k.fields.empty()) return;
  const Grid& g = k.fields.front().grid;
  out << "t";
  for (int d = 0; d < g.dim; ++d) out << ",x" << d + 1;
  out << ",value\n";
  for (std::size_t s = 0; s < k.fields.size(); ++s) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      out << number(k.times[s]);
      for (double x : g.center_point(i)) out << ',' << number(x);
      out << ',' << number(k.fields[s].values[i]) << '\n';
    }
  }
}

std::string summary(const evolution::RunOutcome& r) {
  if (r.kind == evolution::OutcomeKind::BlowUp) {
    return fmt::format("BlowUp t in [{:.6g}, {:.6g}]", r.t_lower, r.t_upper);
  }
  std::string s = fmt::format("{} at t = {:.6g}", evolution::to_string(r.kind), r.final_time);
  for (const auto& c : r.channels) {
    if (!c.values.empty()) s += fmt::format(", {} = {:.6g}", c.name, c.values.back());
  }
  return s;
}

}  // namespace fujita::report
