#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fujita/grid.hpp"

// Data-parallel inner loops. Each kernel has an OpenMP version used by the
// solvers and a plain serial version in kernels::serial that the tests use
// as the reference. Reductions accumulate over fixed-size blocks and combine
// the block partials in index order, so results do not depend on the thread
// count.
namespace fujita::kernels {

/// Compressed sparse rows, diagonal included.
struct Csr {
  std::size_t rows = 0;
  std::vector<std::size_t> row_start;  // rows + 1 entries
  std::vector<std::size_t> col;
  std::vector<double> value;
};

inline constexpr std::size_t kBlock = 2048;

double sum(std::span<const double> u);
double power_sum(std::span<const double> u, double q);  // sum |u|^q
double max_abs(std::span<const double> u);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double min_value(std::span<const double> u);

/// Exact pointwise flow of u' = u^p over dt: u <- (u^{1-p} - (p-1) dt)^{1/(1-p)}.
/// Requires (p-1) dt u^{p-1} < 1 for every entry.
void source_flow(std::span<double> u, double dt, double p);
/// Forward Euler source step u <- u + dt u^p.
void source_euler(std::span<double> u, double dt, double p);

/// out = A in
void csr_apply(const Csr& a, std::span<const double> in, std::span<double> out);
/// out = alpha x + beta y
void axpby(double alpha, std::span<const double> x, double beta, std::span<const double> y,
           std::span<double> out);
/// out = |x|^p elementwise
void pow_abs(std::span<const double> x, double p, std::span<double> out);

void cell_averages(const Grid& grid, const std::function<double(std::span<const double>)>& f,
                   std::span<double> out);

namespace serial {
double sum(std::span<const double> u);
double power_sum(std::span<const double> u, double q);
double max_abs(std::span<const double> u);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double min_value(std::span<const double> u);
void source_flow(std::span<double> u, double dt, double p);
void source_euler(std::span<double> u, double dt, double p);
void csr_apply(const Csr& a, std::span<const double> in, std::span<double> out);
void axpby(double alpha, std::span<const double> x, double beta, std::span<const double> y,
           std::span<double> out);
void pow_abs(std::span<const double> x, double p, std::span<double> out);
void cell_averages(const Grid& grid, const std::function<double(std::span<const double>)>& f,
                   std::span<double> out);
}  // namespace serial

}  // namespace fujita::kernels
