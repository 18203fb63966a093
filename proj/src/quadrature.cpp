#include "fujita/quadrature.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "fujita/error.hpp"

namespace fujita::quad {
namespace {

void check(const Result& r, double a, double b, double rtol, double atol, const char* rule) {
  const double allowed = std::max(rtol * std::abs(r.value), atol);
  if (!std::isfinite(r.value) || r.error > 10.0 * allowed + 1e-300) {
    throw Error(ErrorKind::QuadratureFailure,
                fmt::format("{} on [{}, {}]: value {} error {} exceeds tolerance {}", rule, a, b,
                            r.value, r.error, allowed));
  }
}

}  // namespace

Result adaptive(const Integrand& f, double a, double b, double rtol, double atol) {
  if (a == b) return {};
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  // Recursive bisection driven by the 7/15 difference on each panel; boost's
  // own adaptive driver reports the error on the reference interval.
  struct Panel {
    double lo, hi, value, error;
  };
  auto eval = [&](double lo, double hi) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
    return Panel{lo, hi, v, err * 0.5 * std::abs(hi - lo)};
  };
  std::vector<Panel> done;
  std::vector<std::pair<Panel, int>> todo{{eval(a, b), 0}};
  const double whole = std::abs(todo.front().first.value);
  while (!todo.empty()) {
    auto [panel, depth] = todo.back();
    todo.pop_back();
    const double width_share = std::abs(panel.hi - panel.lo) / std::abs(b - a);
    const double allowed = std::max(rtol * whole, atol) * width_share;
    if (panel.error <= allowed || depth >= 40) {
      done.push_back(panel);
      continue;
    }
    const double mid = 0.5 * (panel.lo + panel.hi);
    todo.push_back({eval(panel.lo, mid), depth + 1});
    todo.push_back({eval(mid, panel.hi), depth + 1});
  }
  Result r;
  for (const Panel& p : done) {
    r.value += p.value;
    r.error += p.error;
  }
  check(r, a, b, rtol, atol, "gauss-kronrod");
  return r;
}

Result endpoint_singular(const Integrand& f, double a, double b, double rtol, double atol) {
  if (a == b) return {};
  // One integrator per thread; construction precomputes the abscissa tables.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  Result r;
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, b, rtol, &r.error, &l1);
  check(r, a, b, rtol, atol, "tanh-sinh");
  return r;
}

Result endpoint_singular_xc(const ComplementIntegrand& f, double a, double b, double rtol, double atol) {
  if (a == b) return {};
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  Result r;
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, b, rtol, &r.error, &l1);
  check(r, a, b, rtol, atol, "tanh-sinh");
  return r;
}

Result power_singular(const Integrand& g, double c, double gamma, double rtol, double atol) {
  if (c == 0.0) return {};
  if (gamma <= 0.0) {
    // bounded integrand; only the endpoint may carry a kink
    auto f = [&](double y) { return std::pow(std::abs(y), -gamma) * g(y); };
    return c > 0 ? endpoint_singular(f, 0.0, c, rtol, atol) : endpoint_singular(f, c, 0.0, rtol, atol);
  }
  const double k = 1.0 / (1.0 - gamma);
  const double scale = std::pow(std::abs(c), 1.0 - gamma) * k;
  auto h = [&](double u) { return g(c * std::pow(u, k)); };
  Result r = endpoint_singular(h, 0.0, 1.0, rtol, atol / scale);
  r.value *= scale;
  r.error *= scale;
  return r;
}

double power_interval(double mid, double half, double power) {
  const double q = power + 1.0;
  const double d = std::abs(mid);
  if (d > half) {
    const double u = half / d;
    return std::pow(d, q) / q * (std::expm1(q * std::log1p(u)) - std::expm1(q * std::log1p(-u)));
  }
  return (std::pow(d + half, q) + std::pow(half - d, q)) / q;
}

}  // namespace fujita::quad
