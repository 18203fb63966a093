#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string_view>
#include <vector>

#include "fujita/grid.hpp"
#include "fujita/kernels.hpp"
#include "fujita/weight.hpp"

namespace fujita {

enum class Boundary { Reflecting, Absorbing };
enum class Scheme { ImplicitEuler, ExplicitEuler };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view name);

/// Harmonic mean of w along the segment joining two adjacent cell centers:
/// length / \int w^{-1} ds. `start` is the lower center, the segment runs
/// `length` along `axis`. Finite and positive for admissible weights because
/// |s|^{-a} is integrable across the singular set when a < 1.
double face_conductance(const Weight& w, std::span<const double> start, int axis, double length);

/// Divergence-form operator A u = -div(w grad u) on the grid, A = sum over
/// faces of (g / h^2)(e_i - e_j)(e_i - e_j)^T. Symmetric positive
/// semidefinite (definite with Absorbing boundary).
class DiffusionOperator {
 public:
  DiffusionOperator(const Weight& w, const Grid& grid, Boundary boundary);

  const Weight& weight() const { return weight_; }
  const Grid& grid() const { return grid_; }
  Boundary boundary() const { return boundary_; }

  /// Harmonic-mean conductance per interior face, indexed [axis][lower cell].
  /// Faces on the upper box boundary hold 0.
  const std::vector<std::vector<double>>& face_conductances() const { return faces_; }
  /// Boundary conductance per cell (Absorbing only; 0 otherwise).
  const std::vector<double>& boundary_conductances() const { return boundary_faces_; }

  const kernels::Csr& matrix() const { return matrix_; }
  double max_diagonal() const { return max_diagonal_; }

 private:
  Weight weight_;
  Grid grid_;
  Boundary boundary_;
  std::vector<std::vector<double>> faces_;
  std::vector<double> boundary_faces_;
  kernels::Csr matrix_;
  double max_diagonal_ = 0.0;
};

/// One step of the discrete linear semigroup, u <- (I + dt A)^{-1} u
/// (ImplicitEuler) or u <- (I - dt A) u (ExplicitEuler). Immutable after
/// construction and shareable between threads.
class Propagator {
 public:
  Propagator(std::shared_ptr<const DiffusionOperator> op, double dt, Scheme scheme);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  const DiffusionOperator& op() const { return *op_; }
  std::shared_ptr<const DiffusionOperator> shared_op() const { return op_; }
  const Grid& grid() const { return op_->grid(); }
  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }

  void step(std::span<double> u) const;
  void advance(std::span<double> u, long steps) const;

  /// Largest explicit step keeping I - dt A nonnegative with margin:
  /// 0.9 / (2 max_i sum_j |A_ij| off-diagonal).
  static double explicit_dt_limit(const DiffusionOperator& op);

 private:
  struct SparseFactor;
  std::shared_ptr<const DiffusionOperator> op_;
  double dt_;
  Scheme scheme_;
  // tridiagonal factors (1D implicit)
  std::vector<double> lower_, inv_den_, upper_ratio_;
  // sparse Cholesky (N >= 2 implicit)
  std::unique_ptr<SparseFactor> sparse_;
  // I - dt A (explicit)
  kernels::Csr explicit_matrix_;
};

std::shared_ptr<const Propagator> build_propagator(const Weight& w, const Grid& grid, double dt,
                                                   Boundary boundary, Scheme scheme);

/// Propagators for one operator at several step sizes, created on demand and
/// shared read-only between runs.
class PropagatorCache {
 public:
  explicit PropagatorCache(std::shared_ptr<const DiffusionOperator> op, Scheme scheme = Scheme::ImplicitEuler)
      : op_(std::move(op)), scheme_(scheme) {}
  std::shared_ptr<const Propagator> get(double dt);
  const DiffusionOperator& op() const { return *op_; }
  std::shared_ptr<const DiffusionOperator> shared_op() const { return op_; }

 private:
  std::shared_ptr<const DiffusionOperator> op_;
  Scheme scheme_;
  std::mutex mutex_;
  std::map<double, std::shared_ptr<const Propagator>> cache_;
};

}  // namespace fujita
