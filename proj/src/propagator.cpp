#include "fujita/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "fujita/error.hpp"
#include "fujita/quadrature.hpp"

namespace fujita {

std::string_view to_string(Boundary b) { return b == Boundary::Reflecting ? "reflecting" : "absorbing"; }

Boundary parse_boundary(std::string_view name) {
  if (name == "reflecting") return Boundary::Reflecting;
  if (name == "absorbing") return Boundary::Absorbing;
  throw Error(ErrorKind::ConfigError, fmt::format("unknown boundary '{}'", name));
}

double face_conductance(const Weight& w, std::span<const double> start, int axis, double length) {
  if (w.exponent == 0.0) return 1.0;
  const double mid = start[axis] + 0.5 * length;
  if (w.kind == WeightKind::AxisPower || w.dim == 1) {
    if (axis != 0) return std::pow(std::abs(start[0]), w.exponent);
    return length / quad::power_interval(mid, 0.5 * length, -w.exponent);
  }
  double perp2 = 0.0;
  for (int i = 0; i < w.dim; ++i) {
    if (i != axis) perp2 += start[i] * start[i];
  }
  if (perp2 == 0.0) return length / quad::power_interval(mid, 0.5 * length, -w.exponent);
  auto inv_w = [&](double s) { return std::pow(s * s + perp2, -0.5 * w.exponent); };
  return length / quad::adaptive(inv_w, start[axis], start[axis] + length, 1e-12).value;
}

DiffusionOperator::DiffusionOperator(const Weight& w, const Grid& grid, Boundary boundary)
    : weight_(w), grid_(grid), boundary_(boundary) {
  w.require_admissible();
  if (w.dim != grid.dim) {
    throw Error(ErrorKind::ConfigError,
                fmt::format("weight dimension {} differs from grid dimension {}", w.dim, grid.dim));
  }
  const std::size_t n = grid.size();
  const double hs = grid.spacing();
  const int dim = grid.dim;
  faces_.assign(dim, std::vector<double>(n, 0.0));
  boundary_faces_.assign(n, 0.0);

  // conductance assembly: one independent quadrature per face
#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t c = 0; c < n; ++c) {
    const auto m = grid.unflatten(c);
    const auto x = grid.center_point(c);
    for (int axis = 0; axis < dim; ++axis) {
      if (m[axis] + 1 < grid.cells) faces_[axis][c] = face_conductance(w, x, axis, hs);
    }
    if (boundary == Boundary::Absorbing) {
      double g = 0.0;
      for (int axis = 0; axis < dim; ++axis) {
        if (m[axis] == 0 || m[axis] + 1 == grid.cells) {
          std::vector<double> start = x;
          const bool low = m[axis] == 0;
          if (low) start[axis] -= 0.5 * hs;
          // half segment between the center and the boundary face, scaled
          // to a flux over distance h/2
          g += 2.0 * face_conductance(w, start, axis, 0.5 * hs);
        }
      }
      boundary_faces_[c] = g;
    }
  }

  const double inv_h2 = 1.0 / (hs * hs);
  std::vector<std::size_t> stride(dim, 1);
  for (int i = 1; i < dim; ++i) stride[i] = stride[i - 1] * grid.cells;
  matrix_.rows = n;
  matrix_.row_start.assign(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c) {
    const auto m = grid.unflatten(c);
    double diag = boundary_faces_[c] * inv_h2;
    std::vector<std::pair<std::size_t, double>> entries;
    for (int axis = 0; axis < dim; ++axis) {
      if (m[axis] > 0) {
        const double g = faces_[axis][c - stride[axis]] * inv_h2;
        entries.emplace_back(c - stride[axis], -g);
        diag += g;
      }
      if (m[axis] + 1 < grid.cells) {
        const double g = faces_[axis][c] * inv_h2;
        entries.emplace_back(c + stride[axis], -g);
        diag += g;
      }
    }
    entries.emplace_back(c, diag);
    std::sort(entries.begin(), entries.end());
    for (const auto& [col, v] : entries) {
      matrix_.col.push_back(col);
      matrix_.value.push_back(v);
    }
    matrix_.row_start[c + 1] = matrix_.col.size();
    max_diagonal_ = std::max(max_diagonal_, diag);
  }
}

struct Propagator::SparseFactor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
};

Propagator::Propagator(std::shared_ptr<const DiffusionOperator> op, double dt, Scheme scheme)
    : op_(std::move(op)), dt_(dt), scheme_(scheme) {
  if (!(dt > 0.0)) throw Error(ErrorKind::ConfigError, fmt::format("time step {} must be positive", dt));
  const kernels::Csr& a = op_->matrix();
  const std::size_t n = a.rows;
  if (scheme == Scheme::ExplicitEuler) {
    const double limit = explicit_dt_limit(*op_);
    if (dt > limit) {
      throw Error(ErrorKind::NotApplicable,
                  fmt::format("explicit step {} exceeds the positivity limit {}", dt, limit));
    }
    explicit_matrix_ = a;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = a.row_start[r]; k < a.row_start[r + 1]; ++k) {
        explicit_matrix_.value[k] = (a.col[k] == r ? 1.0 : 0.0) - dt * a.value[k];
      }
    }
    return;
  }
  if (op_->grid().dim == 1) {
    // Thomas factors of the symmetric tridiagonal I + dt A
    lower_.assign(n, 0.0);
    inv_den_.assign(n, 0.0);
    upper_ratio_.assign(n, 0.0);
    std::vector<double> diag(n), off(n, 0.0);  // off[i] couples i and i+1
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = a.row_start[r]; k < a.row_start[r + 1]; ++k) {
        if (a.col[k] == r) diag[r] = 1.0 + dt * a.value[k];
        if (a.col[k] == r + 1) off[r] = dt * a.value[k];
      }
    }
    double prev_ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lower_[i] = i > 0 ? off[i - 1] : 0.0;
      const double den = diag[i] - lower_[i] * prev_ratio;
      inv_den_[i] = 1.0 / den;
      upper_ratio_[i] = off[i] * inv_den_[i];
      prev_ratio = upper_ratio_[i];
    }
    return;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(a.value.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = a.row_start[r]; k < a.row_start[r + 1]; ++k) {
      const double v = dt * a.value[k] + (a.col[k] == r ? 1.0 : 0.0);
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(a.col[k]), v);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<int>(n), static_cast<int>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  sparse_ = std::make_unique<SparseFactor>();
  sparse_->solver.compute(m);
  if (sparse_->solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NotApplicable, "sparse factorization of I + dt A failed");
  }
}

Propagator::~Propagator() = default;

void Propagator::step(std::span<double> u) const {
  const std::size_t n = u.size();
  if (scheme_ == Scheme::ExplicitEuler) {
    std::vector<double> out(n);
    kernels::csr_apply(explicit_matrix_, u, out);
    std::copy(out.begin(), out.end(), u.begin());
    return;
  }
  if (!lower_.empty()) {
    u[0] *= inv_den_[0];
    for (std::size_t i = 1; i < n; ++i) u[i] = (u[i] - lower_[i] * u[i - 1]) * inv_den_[i];
    for (std::size_t i = n - 1; i-- > 0;) u[i] -= upper_ratio_[i] * u[i + 1];
    return;
  }
  Eigen::Map<Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd x = sparse_->solver.solve(v);
  v = x;
}

void Propagator::advance(std::span<double> u, long steps) const {
  for (long s = 0; s < steps; ++s) step(u);
}

double Propagator::explicit_dt_limit(const DiffusionOperator& op) {
  return 0.9 / (2.0 * op.max_diagonal());
}

std::shared_ptr<const Propagator> build_propagator(const Weight& w, const Grid& grid, double dt,
                                                   Boundary boundary, Scheme scheme) {
  auto op = std::make_shared<const DiffusionOperator>(w, grid, boundary);
  return std::make_shared<const Propagator>(std::move(op), dt, scheme);
}

std::shared_ptr<const Propagator> PropagatorCache::get(double dt) {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(dt);
  if (it != cache_.end()) return it->second;
  if (cache_.size() >= 256) cache_.clear();
  auto prop = std::make_shared<const Propagator>(op_, dt, scheme_);
  cache_.emplace(dt, prop);
  return prop;
}

}  // namespace fujita
