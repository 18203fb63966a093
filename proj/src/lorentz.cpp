#include "fujita/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "fujita/error.hpp"
#include "fujita/kernels.hpp"

namespace fujita::lorentz {

double RearrangementTable::f_star(double s) const {
  // right-continuous: first breakpoint strictly beyond s
  const auto it = std::upper_bound(measures.begin(), measures.end(), s);
  if (it == measures.end()) return 0.0;
  return thresholds[static_cast<std::size_t>(it - measures.begin())];
}

double RearrangementTable::f_star_star(double s) const {
  if (!(s > 0.0)) return thresholds.empty() ? 0.0 : thresholds.front();
  const auto it = std::upper_bound(measures.begin(), measures.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - measures.begin());
  if (k == measures.size()) return prefix.empty() ? 0.0 : prefix.back() / s;
  const double before = k == 0 ? 0.0 : prefix[k - 1];
  const double start = k == 0 ? 0.0 : measures[k - 1];
  return (before + thresholds[k] * (s - start)) / s;
}

double RearrangementTable::distribution(double lambda) const {
  // thresholds are decreasing; count those strictly above lambda
  const auto it = std::partition_point(thresholds.begin(), thresholds.end(),
                                       [lambda](double v) { return v > lambda; });
  const std::size_t k = static_cast<std::size_t>(it - thresholds.begin());
  return k == 0 ? 0.0 : measures[k - 1];
}

double distribution_function(const Field& f, double lambda) {
  std::size_t count = 0;
  for (double v : f.values) count += std::abs(v) > lambda ? 1 : 0;
  return static_cast<double>(count) * f.grid.cell_measure();
}

RearrangementTable rearrangement(const Field& f) {
  std::vector<double> mags;
  mags.reserve(f.size());
  for (double v : f.values) {
    if (v != 0.0) mags.push_back(std::abs(v));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  RearrangementTable t;
  const double cell = f.grid.cell_measure();
  std::size_t i = 0;
  double integral = 0.0;
  while (i < mags.size()) {
    std::size_t j = i;
    while (j < mags.size() && mags[j] == mags[i]) ++j;
    integral += mags[i] * static_cast<double>(j - i) * cell;
    t.thresholds.push_back(mags[i]);
    // count times cell measure, the same expression distribution_function uses
    t.measures.push_back(static_cast<double>(j) * cell);
    t.prefix.push_back(integral);
    i = j;
  }
  return t;
}

Field spherical_rearrangement(const Field& f) {
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> dist(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) dist[i] = f.grid.center_norm(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  std::vector<double> mags(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) mags[i] = std::abs(f.values[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  Field out(f.grid);
  for (std::size_t k = 0; k < order.size(); ++k) out.values[order[k]] = mags[k];
  return out;
}

LorentzNorm weak_norm(const RearrangementTable& table, double r) {
  if (!(r >= 1.0)) {
    throw Error(ErrorKind::Unbounded, fmt::format("weak norm needs r >= 1, got {}", r));
  }
  LorentzNorm norm{r, 0.0, NormKind::Weak};
  if (table.thresholds.empty()) return norm;
  if (r == 1.0) {
    // s f**(s) is the running integral; a grid field is always integrable
    norm.value = table.prefix.back();
    return norm;
  }
  if (std::isinf(r)) {
    norm.value = table.thresholds.front();
    return norm;
  }
  const double exponent = 1.0 / r - 1.0;
  for (std::size_t k = 0; k < table.measures.size(); ++k) {
    norm.value = std::max(norm.value, table.prefix[k] * std::pow(table.measures[k], exponent));
  }
  return norm;
}

LorentzNorm weak_norm(const Field& f, double r) { return weak_norm(rearrangement(f), r); }

LorentzNorm strong_norm(const Field& f, double q) {
  if (!(q >= 1.0)) throw Error(ErrorKind::NotApplicable, fmt::format("L^q norm needs q >= 1, got {}", q));
  return {q, f.norm(q), NormKind::Strong};
}

std::optional<double> weak_holder_ratio(std::span<const Field> fields, std::span<const double> exponents) {
  if (fields.empty() || fields.size() != exponents.size()) {
    throw Error(ErrorKind::NotApplicable, "one exponent per field required");
  }
  double inv = 0.0;
  for (double rj : exponents) inv += 1.0 / rj;
  const double r = 1.0 / inv;
  Field product(fields.front().grid, 1.0);
  double denominator = 1.0;
  for (std::size_t j = 0; j < fields.size(); ++j) {
    const double nj = weak_norm(fields[j], exponents[j]).value;
    if (nj == 0.0) return std::nullopt;
    denominator *= nj;
    for (std::size_t i = 0; i < product.size(); ++i) product.values[i] *= fields[j].values[i];
  }
  return weak_norm(product, r).value / denominator;
}

void write_table_csv(std::ostream& out, const RearrangementTable& table, double r) {
  out << "s,f_star,f_star_star,weighted\n";
  for (std::size_t k = 0; k < table.measures.size(); ++k) {
    const double s = table.measures[k];
    const double fss = table.prefix[k] / s;
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", s, table.thresholds[k], fss,
                       std::pow(s, 1.0 / r) * fss);
  }
}

}  // namespace fujita::lorentz
