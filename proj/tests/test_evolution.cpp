#include <cmath>
#include <vector>

#include "doctest.h"
#include "fujita/error.hpp"
#include "fujita/evolution.hpp"
#include "fujita/kernels.hpp"

using namespace fujita;
using namespace fujita::evolution;

namespace {

RunConfig small_config(double a, double p) {
  RunConfig c;
  c.weight = {WeightKind::AxisPower, a, 1};
  c.p = p;
  c.half_width = 8.0;
  c.cells = 256;
  c.horizon = 1.0;
  c.guard = false;
  return c;
}

}  // namespace

TEST_CASE("data menu") {
  const std::vector<double> four{4.0};
  CHECK(data_value({DataKind::Threshold, 0.3, 1.0}, four, 0.5, 4.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(data_value({DataKind::Bump, 2.0, 1.0}, std::vector<double>{0.0}, 0.0, 2.0) == 2.0);
  CHECK(data_value({DataKind::Bump, 2.0, 1.0}, std::vector<double>{1.0}, 0.0, 2.0) == 0.0);
  CHECK(data_value({DataKind::Indicator, 1.0, 2.0}, std::vector<double>{1.5}, 0.0, 2.0) == 1.0);
  const Grid g(1, 4.0, 64);
  const Field zero = threshold_data(0.0, 0.5, 4.0, g);
  CHECK(kernels::max_abs(zero.values) == 0.0);
  CHECK(DataSpec{DataKind::Bump, 1.0, 3.0}.support_radius() == 3.0);
  CHECK(DataSpec{DataKind::Gaussian, 1.0, 3.0}.support_radius() == 0.0);
}

TEST_CASE("config validation names the key") {
  RunConfig c = small_config(0.5, 1.0);
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(std::string(e.what()).find("p:") != std::string::npos);
  }
  c = small_config(0.5, 2.0);
  c.cells = 255;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config(1.5, 2.0);
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("step ladder") {
  for (double target : {1e-3, 1.7e-3, 0.05, 3.3}) {
    const double dt = ladder_dt(target, 1e-3);
    CHECK(dt <= target * (1 + 1e-12));
    CHECK(dt > target / std::pow(2.0, 0.25) * (1 - 1e-12));
    const double k = 4.0 * std::log2(dt / 1e-3);
    CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-9));
  }
}

TEST_CASE("zero data stays zero") {
  RunConfig c = small_config(0.5, 3.0);
  c.data = {DataKind::Bump, 0.0, 1.0};
  auto cache = make_cache(c);
  Stepper s(c, cache, Field(c.grid()));
  for (int k = 0; k < 50; ++k) s.step(0.02);
  CHECK(kernels::max_abs(s.state().values) == 0.0);
}

TEST_CASE("constant data follows the scalar ODE") {
  for (double a : {-0.5, 0.0, 0.5}) {
    RunConfig c = small_config(a, 2.0);
    auto cache = make_cache(c);
    Stepper s(c, cache, Field(c.grid(), 1.0));
    for (int k = 1; k <= 900; ++k) {
      s.step(1e-3);
      const double t = k * 1e-3;
      const double exact = 1.0 / (1.0 - t);
      CHECK(std::abs(s.sup() - exact) <= 1e-3 * exact);
    }
  }
}

TEST_CASE("run brackets the ODE blow-up time") {
  RunConfig c = small_config(0.5, 2.0);
  c.data = {DataKind::Constant, 1.0, 1.0};
  c.horizon = 2.0;
  const auto out = run(c);
  REQUIRE(out.kind == OutcomeKind::BlowUp);
  CHECK(out.t_lower <= 1.0);
  CHECK(out.t_upper >= 1.0);
  CHECK(out.t_estimate == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("small Gaussian data decays monotonically") {
  RunConfig c = small_config(0.0, 4.0);
  c.data = {DataKind::Gaussian, 0.1, 1.0};
  auto cache = make_cache(c);
  Stepper s(c, cache, initial_field(c.data, c.grid(), 0.0, 4.0));
  double previous = s.sup();
  for (int k = 0; k < 400; ++k) {
    s.step(s.proposed_dt());
    CHECK(s.sup() <= previous);
    previous = s.sup();
  }
}

TEST_CASE("comparison and nonnegativity") {
  RunConfig c = small_config(0.5, 3.0);
  auto cache = make_cache(c);
  const Field lo = initial_field({DataKind::Bump, 0.6, 2.0}, c.grid(), 0.5, 3.0);
  Field hi = initial_field({DataKind::Gaussian, 0.8, 1.5}, c.grid(), 0.5, 3.0);
  for (std::size_t i = 0; i < hi.size(); ++i) hi[i] = std::max(hi[i], lo[i]);
  Stepper a(c, cache, lo);
  Stepper b(c, cache, hi);
  while (a.time() < 1.0) {
    const double dt = std::min({a.proposed_dt(), b.proposed_dt(), 1.0 - a.time()});
    a.step(dt);
    b.step(dt);
    CHECK(kernels::min_value(a.state().values) >= 0.0);
    for (std::size_t i = 0; i < hi.size(); ++i) CHECK(a.state()[i] <= b.state()[i] + 1e-10);
  }
}

TEST_CASE("global claim needs a large enough box") {
  RunConfig c = small_config(0.5, 4.0);
  c.data = {DataKind::Bump, 0.05, 1.0};
  c.guard = true;
  c.horizon = 10.0;
  try {
    run(c);
    FAIL("expected BoundaryContamination");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoundaryContamination);
  }
  c.half_width = 64.0;
  c.cells = 1024;
  const auto out = run(c);
  CHECK(out.kind == OutcomeKind::Global);
  c.guard = false;
  CHECK(run(c).kind == OutcomeKind::HorizonReached);
}

TEST_CASE("snapshots land on the geometric lattice") {
  RunConfig c = small_config(0.5, 4.0);
  c.data = {DataKind::Bump, 0.1, 1.0};
  c.horizon = 10.0;
  c.per_decade = 4;
  c.weak_orders = {2.0};
  const auto out = run(c);
  const auto* sup = out.channel("Linf");
  const auto* weak = out.channel("weak_2");
  REQUIRE(sup != nullptr);
  REQUIRE(weak != nullptr);
  REQUIRE(sup->times.size() == 13);
  for (std::size_t k = 0; k < sup->times.size(); ++k) {
    CHECK(sup->times[k] == doctest::Approx(1e-2 * std::pow(10.0, k / 4.0)).epsilon(1e-12));
  }
}

TEST_CASE("grid refinement converges") {
  std::vector<double> sups;
  for (int cells : {64, 128, 256, 512}) {
    RunConfig c = small_config(0.5, 3.0);
    c.cells = cells;
    c.data = {DataKind::Bump, 1.0, 2.0};
    c.fixed_dt = 1e-3;
    c.horizon = 0.5;
    sups.push_back(run(c).final_field.max_abs());
  }
  const double d1 = std::abs(sups[1] - sups[0]);
  const double d2 = std::abs(sups[2] - sups[1]);
  const double d3 = std::abs(sups[3] - sups[2]);
  CHECK(d2 < d1);
  CHECK(d3 < d2);
}

TEST_CASE("Picard iterates") {
  RunConfig c = small_config(0.5, 3.0);
  c.cells = 128;
  SUBCASE("zero data") {
    c.data = {DataKind::Bump, 0.0, 1.0};
    const auto res = picard_iterate(c, 4, 0.1, 16);
    for (const auto& iterate : res.iterates) {
      for (const Field& f : iterate) CHECK(kernels::max_abs(f.values) == 0.0);
    }
  }
  SUBCASE("monotone and below the stepped solution") {
    c.data = {DataKind::Bump, 1.0, 2.0};
    auto gaps = [&](int slices) {
      const auto res = picard_iterate(c, 6, 0.0, slices);
      const auto stepped = stepped_on_lattice(c, res.tau, slices);
      CHECK(res.max_monotonicity_violation <= 1e-12);
      CHECK(res.sup_iterate <= 2.0 * res.linear_constant * res.data_sup);
      std::vector<double> out;
      for (const auto& iterate : res.iterates) {
        double gap = 0.0;
        for (std::size_t k = 0; k < iterate.size(); ++k) {
          for (std::size_t i = 0; i < iterate[k].size(); ++i) CHECK(iterate[k][i] <= stepped[k][i] + 1e-4);
          gap = std::max(gap, kernels::max_abs_diff(iterate[k].values, stepped[k].values));
        }
        out.push_back(gap);
      }
      return out;
    };
    const auto coarse = gaps(64);
    // decreasing until the two time discretizations part ways
    for (std::size_t n = 1; n < coarse.size(); ++n) {
      if (coarse[n - 1] > 2.0 * coarse.back()) CHECK(coarse[n] < coarse[n - 1]);
    }
    CHECK(coarse.back() < 1e-3 * coarse.front());
    const auto fine = gaps(128);
    CHECK(fine.back() < 0.6 * coarse.back());

    const auto res = picard_iterate(c, 6, 0.0, 64);
    double previous = INFINITY;
    for (std::size_t n = 1; n < res.iterates.size(); ++n) {
      double step = 0.0;
      for (std::size_t k = 0; k < res.iterates[n].size(); ++k) {
        step = std::max(step, kernels::max_abs_diff(res.iterates[n][k].values, res.iterates[n - 1][k].values));
      }
      CHECK(step < 0.5 * previous);
      previous = step;
    }
  }
}

TEST_CASE("stability ratio") {
  RunConfig c = small_config(0.5, 4.0);
  const Field phi = initial_field({DataKind::Bump, 0.5, 2.0}, c.grid(), 0.5, 4.0);
  CHECK(stability_check(c, phi, phi, 1.0).ratio == 0.0);

  Field other = phi;
  const Field bump = initial_field({DataKind::Bump, 1e-3, 1.0}, c.grid(), 0.5, 4.0);
  for (std::size_t i = 0; i < other.size(); ++i) other[i] += bump[i];
  const auto res = stability_check(c, phi, other, 1.0);
  for (std::size_t k = 1; k < res.ratios.size(); ++k) CHECK(res.ratios[k] >= res.ratios[k - 1]);
  CHECK(res.ratio > 0.0);
  CHECK(std::isfinite(res.ratio));
}

TEST_CASE("scaling covariance at lambda = 1") {
  RunConfig c = small_config(0.0, 4.0);
  c.half_width = 4.0;
  c.cells = 256;
  c.data = {DataKind::Bump, 1.0, 1.0};
  c.fixed_dt = 1e-3;
  c.horizon = 0.2;
  CHECK(scaling_covariance_check(c, 1.0).deviation == 0.0);
}
