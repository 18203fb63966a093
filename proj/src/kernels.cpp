#include "fujita/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <omp.h>

namespace fujita::kernels {
namespace {

inline double flow_one(double v, double dt, double p) {
  if (v <= 0.0) return v;
  if (p == 2.0) return v / (1.0 - dt * v);
  const double base = std::pow(v, 1.0 - p) - (p - 1.0) * dt;
  return std::pow(base, 1.0 / (1.0 - p));
}

inline double power_term(double v, double q) {
  const double a = std::abs(v);
  if (q == 1.0) return a;
  if (q == 2.0) return a * a;
  return std::pow(a, q);
}

// Four-point Gauss-Legendre on [-1/2, 1/2].
constexpr std::array<double, 4> kGaussNode{-0.4305681557970262, -0.1699905217924281,
                                           0.1699905217924281, 0.4305681557970262};
constexpr std::array<double, 4> kGaussWeight{0.1739274225687269, 0.3260725774312731,
                                             0.3260725774312731, 0.1739274225687269};

double cell_average_one(const Grid& grid, std::size_t index,
                        const std::function<double(std::span<const double>)>& f) {
  const auto m = grid.unflatten(index);
  const double hs = grid.spacing();
  std::array<double, 3> x{};
  double acc = 0.0;
  int total = 1;
  for (int i = 0; i < grid.dim; ++i) total *= 4;
  for (int q = 0; q < total; ++q) {
    double wgt = 1.0;
    int rest = q;
    for (int i = 0; i < grid.dim; ++i) {
      const int k = rest % 4;
      rest /= 4;
      x[i] = grid.center(m[i]) + hs * kGaussNode[k];
      wgt *= kGaussWeight[k];
    }
    acc += wgt * f(std::span<const double>(x.data(), grid.dim));
  }
  return acc;
}

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn&& block) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    partial[b] = block(b * kBlock, std::min(n, (b + 1) * kBlock));
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

template <class BlockFn>
double serial_blocked_sum(std::size_t n, BlockFn&& block) {
  double s = 0.0;
  for (std::size_t lo = 0; lo < n; lo += kBlock) s += block(lo, std::min(n, lo + kBlock));
  return s;
}

}  // namespace

double sum(std::span<const double> u) {
  return blocked_sum(u.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += u[i];
    return s;
  });
}

double power_sum(std::span<const double> u, double q) {
  return blocked_sum(u.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += power_term(u[i], q);
    return s;
  });
}

double max_abs(std::span<const double> u) {
  double m = 0.0;
  const std::size_t n = u.size();
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  const std::size_t n = a.size();
#pragma omp parallel for reduction(max : m) schedule(static)
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double min_value(std::span<const double> u) {
  double m = u.empty() ? 0.0 : u[0];
  const std::size_t n = u.size();
#pragma omp parallel for reduction(min : m) schedule(static)
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, u[i]);
  return m;
}

void source_flow(std::span<double> u, double dt, double p) {
  const std::size_t n = u.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) u[i] = flow_one(u[i], dt, p);
}

void source_euler(std::span<double> u, double dt, double p) {
  const std::size_t n = u.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] > 0.0) u[i] += dt * std::pow(u[i], p);
  }
}

void csr_apply(const Csr& a, std::span<const double> in, std::span<double> out) {
  const std::size_t rows = a.rows;
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = a.row_start[r]; k < a.row_start[r + 1]; ++k) s += a.value[k] * in[a.col[k]];
    out[r] = s;
  }
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<const double> y,
           std::span<double> out) {
  const std::size_t n = out.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void pow_abs(std::span<const double> x, double p, std::span<double> out) {
  const std::size_t n = out.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = power_term(x[i], p);
}

void cell_averages(const Grid& grid, const std::function<double(std::span<const double>)>& f,
                   std::span<double> out) {
  const std::size_t n = grid.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = cell_average_one(grid, i, f);
}

namespace serial {

double sum(std::span<const double> u) {
  return serial_blocked_sum(u.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += u[i];
    return s;
  });
}

double power_sum(std::span<const double> u, double q) {
  return serial_blocked_sum(u.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += power_term(u[i], q);
    return s;
  });
}

double max_abs(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double min_value(std::span<const double> u) {
  double m = u.empty() ? 0.0 : u[0];
  for (double v : u) m = std::min(m, v);
  return m;
}

void source_flow(std::span<double> u, double dt, double p) {
  for (double& v : u) v = flow_one(v, dt, p);
}

void source_euler(std::span<double> u, double dt, double p) {
  for (double& v : u) {
    if (v > 0.0) v += dt * std::pow(v, p);
  }
}

void csr_apply(const Csr& a, std::span<const double> in, std::span<double> out) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (std::size_t k = a.row_start[r]; k < a.row_start[r + 1]; ++k) s += a.value[k] * in[a.col[k]];
    out[r] = s;
  }
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<const double> y,
           std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * x[i] + beta * y[i];
}

void pow_abs(std::span<const double> x, double p, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = power_term(x[i], p);
}

void cell_averages(const Grid& grid, const std::function<double(std::span<const double>)>& f,
                   std::span<double> out) {
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = cell_average_one(grid, i, f);
}

}  // namespace serial
}  // namespace fujita::kernels
