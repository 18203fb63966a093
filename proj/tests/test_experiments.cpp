#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fujita/error.hpp"
#include "fujita/experiments.hpp"
#include "fujita/fit.hpp"
#include "fujita/lorentz.hpp"

using namespace fujita;
using namespace fujita::experiments;
using evolution::DataKind;
using evolution::OutcomeKind;
using evolution::RunConfig;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RunConfig axis_config(double a, double p) {
  RunConfig c;
  c.weight = {WeightKind::AxisPower, a, 1};
  c.p = p;
  c.half_width = 256.0;
  c.cells = 2048;
  c.horizon = 100.0;
  return c;
}

}  // namespace

TEST_CASE("critical exponent examples") {
  CHECK(critical_exponent(0.0, 2) == 2.0);
  CHECK(critical_exponent(0.5, 1) == 2.5);
  CHECK(critical_exponent(-1.0, 2) == 2.5);
}

TEST_CASE("exponent table identities") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(-0.9, 0.9);
  std::uniform_real_distribution<double> p(1.05, 6.0);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + i % 3;
    const auto t = ExponentTable::make(a(rng), n, p(rng));
    CHECK((t.r_star > 1.0) == (t.p > t.p_star));
    CHECK(t.supercritical() == (t.p > t.p_star));
    CHECK(t.decay(t.r_star) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(t.decay(t.r_star)) <= 1e-12);
    CHECK(t.decay(kInf) == doctest::Approx(1.0 / (t.p - 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("threshold data") {
  const Grid g(1, 64.0, 4096);
  const Field a = evolution::threshold_data(0.05, 0.5, 4.0, g);
  const Field b = evolution::threshold_data(0.15, 0.5, 4.0, g);
  const double wa = lorentz::weak_norm(a, 2.0).value;
  const double wb = lorentz::weak_norm(b, 2.0).value;
  CHECK(std::isfinite(wa));
  CHECK(wa > 0.0);
  CHECK(std::abs(wb - 3.0 * wa) <= 1e-10 * wb);
  // delta / (1 + |x|^{1/2}) is delta / 3 at |x| = 4; cell averages bracket it
  const std::size_t cell = 2048 + 128;  // center 4 + h/2
  CHECK(a[cell - 1] > 0.05 / 3.0);
  CHECK(a[cell] < 0.05 / 3.0);
}

TEST_CASE("decay fit") {
  std::vector<double> t, v, flat;
  for (int k = 0; k <= 24; ++k) {
    t.push_back(std::pow(10.0, k / 8.0));
    v.push_back(2.0 * std::pow(t.back(), -1.0 / 3.0));
    flat.push_back(5.0);
  }
  const auto f = fit::decay_fit(t, v, {});
  CHECK(std::abs(f.slope + 1.0 / 3.0) <= 1e-12);
  CHECK(f.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(f.points == 25);
  CHECK(std::abs(fit::decay_fit(t, flat, {}).slope) <= 1e-12);

  const auto windowed = fit::decay_fit(t, v, {10.0, 100.0});
  CHECK(windowed.points == 9);
  CHECK(windowed.t_lo == 10.0);
  CHECK(windowed.t_hi == doctest::Approx(100.0));
  CHECK_THROWS_AS(fit::decay_fit(t, v, {10.0, 20.0}), Error);
}

TEST_CASE("linear decay of the sup norm") {
  RunConfig c = axis_config(0.5, 2.0);
  c.half_width = 1024.0;
  c.cells = 8192;
  c.data = {DataKind::Bump, 1.0, 1.0};
  std::vector<double> times;
  for (int k = 0; k <= 24; ++k) times.push_back(std::pow(10.0, 1.0 + k / 12.0));
  const auto sup = linear_sup_series(c, times);
  const auto f = fit::decay_fit(times, sup, {100.0, 1000.0});
  CHECK(std::abs(f.slope + 1.0 / 1.5) <= 0.05 / 1.5);

  SUBCASE("decay functional sign law") {
    for (double p : {2.0, 2.5, 4.0}) {
      const auto rep = lemma31_functional(times, sup, p, 0.5, 1, {100.0, 0.0});
      CHECK(rep.expected_slope == doctest::Approx(1.0 / (p - 1.0) - 1.0 / 1.5).epsilon(1e-14));
      CHECK(std::abs(rep.slope.slope - rep.expected_slope) <= 0.1 * (1.0 / 1.5));
      if (p < 2.5) CHECK(rep.slope.slope > 0.0);
      if (p > 2.5) {
        CHECK(rep.slope.slope < 0.0);
        CHECK(rep.sup_time == times.front());
      }
    }
  }
}

TEST_CASE("A_k product constant") {
  const auto two = ak_constant(2.0, 60);
  CHECK(two.tail_bound < 1e-9);
  long double oracle = 1.0L;
  for (int j = 0; j <= 60; ++j) {
    const long double factor = std::pow(2.0L, j + 1.0L) - 1.0L;
    oracle *= std::pow(factor, std::pow(2.0L, -(j + 1.0L)));
  }
  CHECK(two.product == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-13));
  for (std::size_t j = 1; j < two.partial_products.size(); ++j) {
    CHECK(two.partial_products[j] >= two.partial_products[j - 1]);
  }
  for (double p : {1.5, 2.0, 3.0, 10.0}) {
    const auto ak = ak_constant(p, 40);
    for (double v : ak.partial_products) CHECK(v <= ak.comparison_bound * (1.0 + 1e-14));
  }
  CHECK(ak_constant(100.0, 40).product < 1.2);
  CHECK_THROWS_AS(ak_constant(1.0, 10), Error);
}

TEST_CASE("classification labels") {
  SUBCASE("subcritical bump blows up") {
    RunConfig c = axis_config(0.5, 2.0);
    c.data = {DataKind::Bump, 1.0, 1.0};
    c.guard = false;
    const auto pt = classify(c);
    REQUIRE(pt.outcome.has_value());
    CHECK(*pt.outcome == OutcomeKind::BlowUp);
    CHECK(pt.consistency == Consistency::Consistent);
    CHECK(pt.t_blowup_lo <= pt.t_blowup_hi);
  }
  SUBCASE("large supercritical data blows up") {
    RunConfig c = axis_config(0.5, 4.0);
    c.data = {DataKind::Constant, 2.0, 1.0};
    c.guard = false;
    const auto pt = classify(c);
    CHECK(*pt.outcome == OutcomeKind::BlowUp);
    CHECK(pt.consistency == Consistency::ConsistentWithSmallnessHypothesis);
  }
  SUBCASE("small supercritical data decays") {
    RunConfig c = axis_config(0.5, 4.0);
    c.data = {DataKind::Bump, 0.1, 1.0};
    const auto pt = classify(c);
    CHECK(*pt.outcome == OutcomeKind::Global);
    REQUIRE(pt.slope_inf.has_value());
    CHECK(pt.slope_inf->slope <= -1.0 / 3.0 * 0.85);
    CHECK(pt.consistency == Consistency::Consistent);
    CHECK(pt.slope_weak_rstar.has_value());
  }
  SUBCASE("small subcritical data is undecided") {
    RunConfig c = axis_config(0.5, 2.0);
    c.data = {DataKind::Bump, 1e-4, 1.0};
    c.horizon = 10.0;
    const auto pt = classify(c);
    CHECK(*pt.outcome == OutcomeKind::Global);
    CHECK(pt.consistency == Consistency::Undecided);
  }
}

TEST_CASE("global amplitude search") {
  RunConfig c = axis_config(0.5, 4.0);
  c.horizon = 10.0;
  c.half_width = 64.0;
  c.cells = 512;
  c.data = {DataKind::Bump, 16.0, 1.0};
  const auto s = search_global_delta(c);
  CHECK(s.outcome.kind != OutcomeKind::BlowUp);
  CHECK(s.halvings > 0);
  CHECK(s.delta == doctest::Approx(16.0 / std::pow(2.0, s.halvings)));
  c.data.amplitude = 2.0 * s.delta;
  CHECK(evolution::run(c).kind == OutcomeKind::BlowUp);
}

TEST_CASE("outcome is monotone in the amplitude") {
  RunConfig c = axis_config(0.5, 4.0);
  c.horizon = 10.0;
  c.half_width = 64.0;
  c.cells = 512;
  bool blew = false;
  for (double amp : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    c.data = {DataKind::Bump, amp, 1.0};
    const bool now = evolution::run(c).kind == OutcomeKind::BlowUp;
    if (blew) CHECK(now);
    blew = blew || now;
  }
  CHECK(blew);
}

TEST_CASE("critical mass growth") {
  RunConfig c = axis_config(0.0, 3.0);
  c.guard = false;
  SUBCASE("zero data") {
    c.data = {DataKind::Bump, 0.0, 1.0};
    CHECK_THROWS_AS(critical_mass_growth(c), Error);
  }
  SUBCASE("critical power grows the mass") {
    c.data = {DataKind::Bump, 1.0, 1.0};
    c.horizon = 1e4;
    c.per_decade = 16;
    const auto rep = critical_mass_growth(c);
    CHECK(rep.slope > 0.0);
  }
  SUBCASE("off the critical power") {
    c.p = 4.0;
    c.data = {DataKind::Bump, 0.1, 1.0};
    c.per_decade = 16;
    CHECK_THROWS_AS(critical_mass_growth(c), Error);
    const auto rep = critical_mass_growth(c, 0.0, false);
    CHECK(std::abs(rep.slope) <= 1e-3 * rep.mass.back());
  }
}

TEST_CASE("sweep rows") {
  RunConfig c = axis_config(0.5, 2.0);
  c.half_width = 64.0;
  c.cells = 512;
  c.horizon = 20.0;
  c.data = {DataKind::Threshold, 0.05, 1.0};
  const std::vector<double> ps{3.0};
  const std::vector<double> as{0.5};
  RunConfig single = c;
  single.p = 3.0;
  const auto one = sweep(c, ps, as, 2);
  const auto direct = classify(single);
  REQUIRE(one.size() == 1);
  std::ostringstream a, b;
  write_sweep_csv(a, one);
  write_sweep_csv(b, std::vector<PhasePoint>{direct});
  CHECK(a.str() == b.str());

  const std::vector<double> grid_p{1.5, 3.0, 5.0};
  const std::vector<double> grid_a{-0.5, 0.0, 0.5};
  const auto serial = sweep(c, grid_p, grid_a, 1);
  const auto parallel = sweep(c, grid_p, grid_a, 4);
  REQUIRE(serial.size() == 9);
  std::ostringstream s1, s2;
  write_sweep_csv(s1, serial);
  write_sweep_csv(s2, parallel);
  CHECK(s1.str() == s2.str());
  for (std::size_t k = 0; k < 9; ++k) {
    CHECK(serial[k].p == grid_p[k % 3]);
    CHECK(serial[k].alpha == grid_a[k / 3]);
  }
  const std::string header = s1.str().substr(0, s1.str().find('\n'));
  CHECK(header == "p,alpha,N,p_star,r_star,outcome,t_blowup_lo,t_blowup_hi,slope_inf,slope_weak_rstar,consistency");
}
