#include "fujita/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fujita/error.hpp"
#include "fujita/kernels.hpp"

namespace fujita {

Grid::Grid(int dim_, double half_width_, int cells_) : dim(dim_), half_width(half_width_), cells(cells_) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::ConfigError, fmt::format("grid dimension {} not in 1..3", dim));
  if (cells < 2 || cells % 2 != 0) {
    throw Error(ErrorKind::ConfigError, fmt::format("grid.cells = {} must be even and >= 2", cells));
  }
  if (!(half_width > 0.0)) throw Error(ErrorKind::ConfigError, "grid.L must be positive");
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(cells);
  return s;
}

double Grid::cell_measure() const { return std::pow(spacing(), dim); }
double Grid::domain_measure() const { return std::pow(2.0 * half_width, dim); }

std::array<int, 3> Grid::unflatten(std::size_t index) const {
  std::array<int, 3> m{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    m[i] = static_cast<int>(index % cells);
    index /= cells;
  }
  return m;
}

std::size_t Grid::flatten(std::span<const int> multi) const {
  std::size_t index = 0;
  for (int i = dim - 1; i >= 0; --i) index = index * cells + static_cast<std::size_t>(multi[i]);
  return index;
}

std::vector<double> Grid::center_point(std::size_t index) const {
  const auto m = unflatten(index);
  std::vector<double> x(dim);
  for (int i = 0; i < dim; ++i) x[i] = center(m[i]);
  return x;
}

double Grid::center_norm(std::size_t index) const {
  const auto m = unflatten(index);
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += center(m[i]) * center(m[i]);
  return std::sqrt(s);
}

std::vector<std::size_t> Grid::cells_touching(std::span<const double> x) const {
  const double hs = spacing();
  std::vector<std::vector<int>> per_axis(dim);
  for (int i = 0; i < dim; ++i) {
    const double u = (x[i] + half_width) / hs;
    if (u < 0.0 || u > cells) return {};
    const double k = std::floor(u);
    if (u == k) {
      if (k > 0) per_axis[i].push_back(static_cast<int>(k) - 1);
      if (k < cells) per_axis[i].push_back(static_cast<int>(k));
    } else {
      per_axis[i].push_back(static_cast<int>(k));
    }
  }
  std::vector<std::size_t> out{0};
  std::vector<std::size_t> stride(dim, 1);
  for (int i = 1; i < dim; ++i) stride[i] = stride[i - 1] * cells;
  for (int i = 0; i < dim; ++i) {
    std::vector<std::size_t> next;
    for (std::size_t base : out) {
      for (int k : per_axis[i]) next.push_back(base + stride[i] * static_cast<std::size_t>(k));
    }
    out = std::move(next);
  }
  return out;
}

bool Grid::in_outer_shell(std::size_t index, double fraction) const {
  const auto m = unflatten(index);
  for (int i = 0; i < dim; ++i) {
    if (half_width - std::abs(center(m[i])) < fraction * half_width) return true;
  }
  return false;
}

double Field::sample(std::span<const double> x) const {
  const auto touching = grid.cells_touching(x);
  if (touching.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t c : touching) s += values[c];
  return s / static_cast<double>(touching.size());
}

double Field::interpolate(std::span<const double> x) const {
  const double hs = grid.spacing();
  std::array<int, 3> lo{};
  std::array<double, 3> frac{};
  for (int i = 0; i < grid.dim; ++i) {
    const double u = (x[i] + grid.half_width) / hs - 0.5;
    const double clamped = std::clamp(u, 0.0, static_cast<double>(grid.cells - 1));
    int k = static_cast<int>(std::floor(clamped));
    if (k >= grid.cells - 1) k = grid.cells - 2;
    lo[i] = k;
    frac[i] = clamped - k;
  }
  double result = 0.0;
  const int corners = 1 << grid.dim;
  for (int c = 0; c < corners; ++c) {
    std::array<int, 3> m{};
    double wgt = 1.0;
    for (int i = 0; i < grid.dim; ++i) {
      const bool up = (c >> i) & 1;
      m[i] = lo[i] + (up ? 1 : 0);
      wgt *= up ? frac[i] : 1.0 - frac[i];
    }
    if (wgt != 0.0) result += wgt * values[grid.flatten(std::span<const int>(m.data(), grid.dim))];
  }
  return result;
}

double Field::mass() const { return kernels::sum(values) * grid.cell_measure(); }
double Field::max_abs() const { return kernels::max_abs(values); }

double Field::norm(double q) const {
  if (std::isinf(q)) return max_abs();
  return std::pow(kernels::power_sum(values, q) * grid.cell_measure(), 1.0 / q);
}

Field cell_averages(const Grid& grid, const PointFunction& f) {
  Field out(grid);
  kernels::cell_averages(grid, f, out.values);
  return out;
}

Field power_profile_1d(const Grid& grid, double center, double gamma, double amplitude) {
  if (grid.dim != 1) throw Error(ErrorKind::NotApplicable, "power_profile_1d needs a 1D grid");
  Field out(grid);
  const double hs = grid.spacing();
  const double q = 1.0 - gamma;
  // F(y) = sign(y)|y|^q / q is an antiderivative of |y|^{-gamma}
  auto prim = [q](double y) { return std::copysign(std::pow(std::abs(y), q), y) / q; };
  for (int i = 0; i < grid.cells; ++i) {
    const double a = grid.center(i) - 0.5 * hs - center;
    const double b = a + hs;
    out.values[i] = amplitude * (prim(b) - prim(a)) / hs;
  }
  return out;
}

}  // namespace fujita
