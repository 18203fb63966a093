#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fujita/error.hpp"
#include "fujita/fit.hpp"
#include "fujita/kernel_lab.hpp"
#include "fujita/propagator.hpp"

using namespace fujita;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field centered_indicator(const Grid& g, double half) {
  return cell_averages(g, [half](std::span<const double> x) {
    for (double c : x) {
      if (std::abs(c) > half) return 0.0;
    }
    return 1.0;
  });
}

}  // namespace

TEST_CASE("geometric time lattice") {
  const auto t = kernel_lab::geometric_times(0.25, 4.0, 4);
  REQUIRE(t.size() == 17);
  CHECK(t.front() == 0.25);
  CHECK(t.back() == doctest::Approx(4.0).epsilon(1e-14));
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] / t[k - 1] == doctest::Approx(std::pow(2.0, 0.25)));
}

TEST_CASE("discrete delta splits unit mass over the touching cells") {
  const Grid g1(1, 2.0, 16);
  const std::vector<double> origin{0.0};
  const Field d = kernel_lab::discrete_delta(g1, origin);
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d[7] == d[8]);
  CHECK(d[7] > 0.0);

  const Grid g2(2, 2.0, 16);
  const std::vector<double> inside{0.3, -0.3};
  CHECK(kernel_lab::discrete_delta(g2, inside).mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("classical kernel at the origin") {
  const Grid g(1, 16.0, 2048);
  auto prop = build_propagator({WeightKind::AxisPower, 0.0, 1}, g, 1e-3, Boundary::Reflecting, Scheme::ImplicitEuler);
  const std::vector<double> y{0.0};
  const std::vector<double> times{1.0};
  const auto k = kernel_lab::estimate_kernel(*prop, y, times);
  const double at_origin = 0.5 * (k.fields[0][1023] + k.fields[0][1024]);
  CHECK(at_origin == doctest::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)).epsilon(0.01));
  CHECK(kernel_lab::gaussian_deviation(k) <= 0.01);
}

TEST_CASE("kernel mass, positivity and parity") {
  const Weight w{WeightKind::AxisPower, 0.5, 1};
  const Grid g(1, 32.0, 2048);
  auto prop = build_propagator(w, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
  const std::vector<double> y{0.0};
  const std::vector<double> times{0.01, 0.5, 1.0, 2.0};
  const auto k = kernel_lab::estimate_kernel(*prop, y, times);
  for (const Field& f : k.fields) {
    CHECK(std::abs(f.mass() - 1.0) <= 1e-10);
    for (double v : f.values) CHECK(v >= -1e-14);
  }
  const Field& at1 = k.fields[2];
  for (std::size_t i = 0; i < g.size() / 2; ++i) {
    CHECK(std::abs(at1[i] - at1[g.size() - 1 - i]) <= 1e-10 * at1.max_abs());
  }
}

TEST_CASE("kernel symmetry in the pole") {
  // Gamma(x, y, t) from a pole at y, against Gamma(y, x, t) from a pole at x
  const Weight w{WeightKind::AxisPower, 0.5, 1};
  const Grid g(1, 16.0, 1024);
  auto prop = build_propagator(w, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
  const std::vector<double> times{1.0};
  // cell faces, so each delta sits on exactly two cells
  const std::vector<double> y{-1.0};
  const std::vector<double> x{2.5};
  const auto ky = kernel_lab::estimate_kernel(*prop, y, times);
  const auto kx = kernel_lab::estimate_kernel(*prop, x, times);
  const double gxy = ky.fields[0].sample(x);
  const double gyx = kx.fields[0].sample(y);
  CHECK(std::abs(gxy - gyx) <= 1e-10 * ky.fields[0].max_abs());
}

TEST_CASE("kernel axioms report") {
  for (const Weight& w : {Weight{WeightKind::AxisPower, 0.5, 1}, Weight{WeightKind::AxisPower, -0.5, 1}}) {
    const Grid g(1, 32.0, 2048);
    auto prop = build_propagator(w, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    const std::vector<double> y{0.0};
    const std::vector<double> times{1.0, 2.0};
    const auto k = kernel_lab::estimate_kernel(*prop, y, times);
    const auto r = kernel_lab::verify_k_axioms(*prop, k, 0, 1);
    CHECK(r.s == doctest::Approx(1.0));
    CHECK(r.t == doctest::Approx(2.0));
    CHECK(r.mass_error <= 1e-10);
    CHECK(r.restart_deviation <= 1e-12);
    CHECK(r.composition_deviation <= 1e-12);
    CHECK(r.symmetry_deviation <= 1e-10);
    CHECK(r.pass);
  }
}

TEST_CASE("boundary guard") {
  const Grid g(1, 2.0, 128);
  auto prop = build_propagator({WeightKind::AxisPower, 0.0, 1}, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
  const std::vector<double> y{0.0};
  const std::vector<double> times{4.0};
  try {
    kernel_lab::estimate_kernel(*prop, y, times);
    FAIL("expected BoundaryContamination");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoundaryContamination);
  }
}

TEST_CASE("on-diagonal decay slopes") {
  const std::vector<double> y{0.0};
  const auto times = kernel_lab::geometric_times(1.0, 128.0, 4);
  SUBCASE("constant weight") {
    const Grid g(1, 256.0, 8192);
    auto prop = build_propagator({WeightKind::AxisPower, 0.0, 1}, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    const auto k = kernel_lab::estimate_kernel(*prop, y, times);
    const auto rep = kernel_lab::verify_k3_sandwich({WeightKind::AxisPower, 0.0, 1}, k);
    CHECK(rep.expected_diagonal_slope == doctest::Approx(-0.5));
    CHECK(std::abs(rep.diagonal_slope + 0.5) <= 0.02 * 0.5);
  }
  SUBCASE("a = -0.5 on the singular line") {
    const Weight w{WeightKind::AxisPower, -0.5, 1};
    const Grid g(1, 128.0, 8192);
    auto prop = build_propagator(w, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    const auto k = kernel_lab::estimate_kernel(*prop, y, times);
    std::vector<double> diag;
    for (const Field& f : k.fields) diag.push_back(f.sample(y));
    const auto fit = fit::decay_fit(k.times, diag, {}, {.min_points = 8, .min_decades = 2.0});
    CHECK(std::abs(fit.slope + 1.0 / 2.5) <= 0.05 / 2.5);
  }
}

TEST_CASE("smoothing estimates") {
  const std::vector<kernel_lab::SmoothingPair> pairs{{1.0, kInf, false}, {1.0, 1.0, false}, {2.0, 2.0, false},
                                         {kInf, kInf, false}, {2.0, 2.0, true}};
  const auto times = kernel_lab::geometric_times(1.0, 100.0, 4);

  SUBCASE("constant weight: contraction and the Gaussian constant") {
    const Grid g(1, 128.0, 4096);
    auto prop = build_propagator({WeightKind::AxisPower, 0.0, 1}, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    const Field phi = centered_indicator(g, 0.5);
    const auto res = kernel_lab::verify_smoothing(*prop, phi, times, pairs);
    for (std::size_t k = 1; k < res.size(); ++k) {
      if (!res[k].pair.weak) CHECK(res[k].max_ratio <= 1.0 + 1e-10);
    }
    CHECK(res[0].last_ratio == doctest::Approx(1.0 / std::sqrt(4.0 * std::numbers::pi)).epsilon(0.01));
    CHECK(res[0].last_ratio > res[0].ratios.front());
  }
  SUBCASE("a = 0.5 sup-norm slope") {
    const Grid g(1, 1024.0, 16384);
    auto prop = build_propagator({WeightKind::AxisPower, 0.5, 1}, g, 5e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    const Field phi = centered_indicator(g, 0.5);
    const auto res = kernel_lab::verify_smoothing(*prop, phi, kernel_lab::geometric_times(20.0, 400.0, 4), pairs);
    CHECK(std::abs(res[0].slope + 1.0 / 1.5) <= 0.05 / 1.5);
    for (std::size_t k = 1; k < 4; ++k) CHECK(res[k].max_ratio <= 1.0 + 1e-10);
  }
}

TEST_CASE("lower bound on the ball") {
  const auto times = kernel_lab::geometric_times(1.0, 1000.0, 4);
  SUBCASE("constant weight approaches the Gaussian minimum") {
    const Grid g(1, 256.0, 4096);
    auto prop = build_propagator({WeightKind::AxisPower, 0.0, 1}, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    const auto rep = kernel_lab::verify_ball_lower_bound(*prop, centered_indicator(g, 0.5), times);
    CHECK(rep.stable);
    const double gaussian = std::exp(-0.25) / std::sqrt(4.0 * std::numbers::pi);
    CHECK(rep.scaled_minimum.back() == doctest::Approx(gaussian).epsilon(0.02));
    CHECK(rep.constant == doctest::Approx(gaussian).epsilon(0.1));
  }
  SUBCASE("a = 0.5") {
    const Grid g(1, 256.0, 4096);
    auto prop = build_propagator({WeightKind::AxisPower, 0.5, 1}, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    const auto rep = kernel_lab::verify_ball_lower_bound(*prop, centered_indicator(g, 0.5),
                                                         kernel_lab::geometric_times(1.0, 100.0, 4));
    CHECK(rep.stable);
    CHECK(rep.constant > 0.0);
    CHECK(rep.spread <= 0.2);
  }
  SUBCASE("trivial data") {
    const Grid g(1, 8.0, 64);
    auto prop = build_propagator({WeightKind::AxisPower, 0.5, 1}, g, 1e-2, Boundary::Reflecting, Scheme::ImplicitEuler);
    CHECK_THROWS_AS(kernel_lab::verify_ball_lower_bound(*prop, Field(g), times), Error);
  }
}
