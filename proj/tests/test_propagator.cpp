#include <cmath>
#include <random>
#include <vector>

#include <omp.h>

#include "doctest.h"
#include "fujita/error.hpp"
#include "fujita/grid.hpp"
#include "fujita/kernel_lab.hpp"
#include "fujita/kernels.hpp"
#include "fujita/propagator.hpp"

using namespace fujita;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  namespace k = kernels;
  // several blocks plus a ragged tail
  const std::size_t n = 5 * k::kBlock + 123;
  const auto a = random_values(n, 1, -2.0, 3.0);
  const auto b = random_values(n, 2, -1.0, 1.0);
  const auto pos = random_values(n, 3, 0.0, 2.0);

  for (int threads : {1, 3, 8}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);
    CHECK(k::sum(a) == k::serial::sum(a));
    CHECK(k::power_sum(a, 1.0) == k::serial::power_sum(a, 1.0));
    CHECK(k::power_sum(a, 2.7) == k::serial::power_sum(a, 2.7));
    CHECK(k::max_abs(a) == k::serial::max_abs(a));
    CHECK(k::max_abs_diff(a, b) == k::serial::max_abs_diff(a, b));
    CHECK(k::min_value(a) == k::serial::min_value(a));

    for (double p : {2.0, 3.5}) {
      auto x = pos;
      auto y = pos;
      k::source_flow(x, 0.05, p);
      k::serial::source_flow(y, 0.05, p);
      CHECK(x == y);
      x = pos;
      y = pos;
      k::source_euler(x, 0.05, p);
      k::serial::source_euler(y, 0.05, p);
      CHECK(x == y);
    }

    std::vector<double> o1(n), o2(n);
    k::axpby(0.3, a, -1.7, b, o1);
    k::serial::axpby(0.3, a, -1.7, b, o2);
    CHECK(o1 == o2);
    k::pow_abs(a, 1.5, o1);
    k::serial::pow_abs(a, 1.5, o2);
    CHECK(o1 == o2);

    const Grid g(2, 4.0, 64);
    DiffusionOperator op({WeightKind::AxisPower, 0.5, 2}, g, Boundary::Reflecting);
    const auto u = random_values(g.size(), 4, 0.0, 1.0);
    std::vector<double> m1(g.size()), m2(g.size());
    k::csr_apply(op.matrix(), u, m1);
    k::serial::csr_apply(op.matrix(), u, m2);
    CHECK(m1 == m2);

    auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(-x[1] * x[1]); };
    k::cell_averages(g, f, m1);
    k::serial::cell_averages(g, f, m2);
    CHECK(m1 == m2);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("source flow solves u' = u^p exactly") {
  std::vector<double> u{0.0, 0.5, 1.0, 2.0};
  kernels::source_flow(u, 0.2, 2.0);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == doctest::Approx(0.5 / (1.0 - 0.1)).epsilon(1e-15));
  CHECK(u[2] == doctest::Approx(1.0 / 0.8).epsilon(1e-15));
  CHECK(u[3] == doctest::Approx(2.0 / 0.6).epsilon(1e-15));
  std::vector<double> v{1.0};
  kernels::source_flow(v, 0.1, 3.0);
  CHECK(v[0] == doctest::Approx(1.0 / std::sqrt(1.0 - 0.2)).epsilon(1e-15));
}

TEST_CASE("constant weight gives the standard Laplacian stencil") {
  const Grid g(1, 1.0, 16);
  DiffusionOperator op({WeightKind::AxisPower, 0.0, 1}, g, Boundary::Reflecting);
  const double hs = g.spacing();
  for (double c : op.face_conductances()[0]) {
    if (c != 0.0) CHECK(c == 1.0);
  }
  const auto& m = op.matrix();
  for (std::size_t row = 1; row + 1 < m.rows; ++row) {
    for (std::size_t k = m.row_start[row]; k < m.row_start[row + 1]; ++k) {
      const double expected = m.col[k] == row ? 2.0 / (hs * hs) : -1.0 / (hs * hs);
      CHECK(m.value[k] == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("face conductance across the singular set") {
  const std::vector<double> start{-0.05};
  const Weight half{WeightKind::AxisPower, 0.5, 1};
  const double expected = 0.1 / (2.0 * 2.0 * std::sqrt(0.05));
  CHECK(face_conductance(half, start, 0, 0.1) == doctest::Approx(expected).epsilon(1e-13));

  double previous = INFINITY;
  for (double a : {0.5, 0.8, 0.9, 0.99, 0.999, 0.9999}) {
    const double c = face_conductance({WeightKind::AxisPower, a, 1}, start, 0, 0.1);
    CHECK(c > 0.0);
    CHECK(c < previous);
    // closed form h / (2 (h/2)^{1-a} / (1-a))
    CHECK(c == doctest::Approx(0.1 * (1.0 - a) / (2.0 * std::pow(0.05, 1.0 - a))).epsilon(1e-12));
    previous = c;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("implicit steps conserve mass and positivity") {
  for (const Weight& w : {Weight{WeightKind::AxisPower, -0.5, 1}, Weight{WeightKind::AxisPower, 0.5, 1},
                          Weight{WeightKind::AxisPower, 0.5, 2}, Weight{WeightKind::RadialPower, -1.0, 2}}) {
    CAPTURE(w.describe());
    const Grid g(w.dim, 4.0, w.dim == 1 ? 256 : 48);
    auto prop = build_propagator(w, g, 0.05, Boundary::Reflecting, Scheme::ImplicitEuler);
    Field u(g, random_values(g.size(), 7, 0.0, 1.0));
    const double mass = u.mass();
    for (int s = 0; s < 40; ++s) {
      prop->step(u.values);
      CHECK(kernels::min_value(u.values) >= 0.0);
    }
    CHECK(u.mass() == doctest::Approx(mass).epsilon(1e-12));
  }
}

TEST_CASE("explicit and implicit schemes agree to first order") {
  const Weight w{WeightKind::AxisPower, 0.5, 1};
  const Grid g(1, 4.0, 64);
  auto op = std::make_shared<const DiffusionOperator>(w, g, Boundary::Reflecting);
  const Field phi = cell_averages(g, [](std::span<const double> x) { return std::exp(-x[0] * x[0]); });
  const double dt0 = 0.5 * Propagator::explicit_dt_limit(*op);
  auto gap = [&](double dt) {
    Propagator ex(op, dt, Scheme::ExplicitEuler);
    Propagator im(op, dt, Scheme::ImplicitEuler);
    Field a = phi, b = phi;
    const long steps = std::lround(0.25 / dt0) * std::lround(dt0 / dt);
    ex.advance(a.values, steps);
    im.advance(b.values, steps);
    CHECK(kernels::min_value(a.values) >= 0.0);
    return kernels::max_abs_diff(a.values, b.values);
  };
  const double g1 = gap(dt0);
  const double g2 = gap(dt0 / 2);
  const double g4 = gap(dt0 / 4);
  CHECK(g1 / g2 == doctest::Approx(2.0).epsilon(0.2));
  CHECK(g2 / g4 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("absorbing and reflecting kernels agree away from the boundary") {
  const Weight w{WeightKind::AxisPower, 0.5, 1};
  const Grid g(1, 32.0, 1024);
  auto refl = build_propagator(w, g, 0.01, Boundary::Reflecting, Scheme::ImplicitEuler);
  auto abs = build_propagator(w, g, 0.01, Boundary::Absorbing, Scheme::ImplicitEuler);
  const std::vector<double> y{0.0};
  const std::vector<double> times{1.0, 4.0};
  const auto kr = kernel_lab::estimate_kernel(*refl, y, times);
  const auto ka = kernel_lab::estimate_kernel(*abs, y, times, false);
  for (std::size_t s = 0; s < times.size(); ++s) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::abs(g.center(static_cast<int>(i))) <= 0.5 * g.half_width) {
        CHECK(std::abs(kr.fields[s][i] - ka.fields[s][i]) <= 1e-6);
      }
    }
  }
  CHECK(ka.fields.back().mass() < 1.0);
}

TEST_CASE("propagator cache shares one propagator per step size") {
  const Grid g(1, 2.0, 32);
  auto op = std::make_shared<const DiffusionOperator>(Weight{WeightKind::AxisPower, 0.0, 1}, g, Boundary::Reflecting);
  PropagatorCache cache(op);
  auto a = cache.get(0.1);
  auto b = cache.get(0.1);
  auto c = cache.get(0.2);
  CHECK(a.get() == b.get());
  CHECK(a.get() != c.get());
  CHECK(c->dt() == 0.2);
}

TEST_CASE("inadmissible weights are rejected") {
  const Grid g(1, 2.0, 32);
  CHECK_THROWS_AS(DiffusionOperator({WeightKind::AxisPower, 1.2, 1}, g, Boundary::Reflecting), Error);
}
