#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fujita {

/// Cell-centered uniform mesh on the box [-half_width, half_width]^dim with
/// `cells` cells per axis. Axis 0 (the x_1 direction) varies fastest in the
/// flat index. An even cell count keeps every center off the hyperplanes
/// x_i = 0; those hyperplanes are faces.
struct Grid {
  int dim = 1;
  double half_width = 1.0;
  int cells = 2;

  Grid() = default;
  Grid(int dim, double half_width, int cells);

  std::size_t size() const;
  double spacing() const { return 2.0 * half_width / cells; }
  double cell_measure() const;
  double domain_measure() const;

  std::array<int, 3> unflatten(std::size_t index) const;
  std::size_t flatten(std::span<const int> multi) const;
  double center(int i) const { return -half_width + (i + 0.5) * spacing(); }
  std::vector<double> center_point(std::size_t index) const;
  double center_norm(std::size_t index) const;

  /// Cells whose closure contains x (1, 2, 4 or 8 of them); empty outside the box.
  std::vector<std::size_t> cells_touching(std::span<const double> x) const;

  /// Cells whose distance from the box boundary is below `fraction` of the half width.
  bool in_outer_shell(std::size_t index, double fraction) const;

  bool operator==(const Grid&) const = default;
};

/// Scalar field of cell averages.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  /// Average of the cells touching x.
  double sample(std::span<const double> x) const;
  /// Multilinear interpolation between cell centers (clamped at the boundary).
  double interpolate(std::span<const double> x) const;

  double mass() const;
  double max_abs() const;
  double norm(double q) const;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Cell averages by tensor Gauss-Legendre (4 points per axis).
Field cell_averages(const Grid& grid, const PointFunction& f);

/// Exact cell averages of amplitude * |x_1 - center|^{-gamma} on a 1D grid.
Field power_profile_1d(const Grid& grid, double center, double gamma, double amplitude = 1.0);

}  // namespace fujita
