#pragma once

#include <functional>

namespace fujita::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

using Integrand = std::function<double(double)>;
/// f(x, xc) with xc = a - x (< 0) in the lower half of [a, b] and b - x
/// (>= 0) in the upper. Branch on the sign of xc, not on x.
using ComplementIntegrand = std::function<double(double, double)>;

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws QuadratureFailure when the
/// error estimate stays above max(rtol * |value|, atol).
Result adaptive(const Integrand& f, double a, double b, double rtol, double atol = 0.0);

/// Double-exponential rule for integrands with algebraic endpoint
/// singularities or square-root kinks at a and/or b.
Result endpoint_singular(const Integrand& f, double a, double b, double rtol, double atol = 0.0);

/// Same rule, but the integrand also receives the endpoint distance without
/// cancellation, for factors that vanish at a or b.
Result endpoint_singular_xc(const ComplementIntegrand& f, double a, double b, double rtol, double atol = 0.0);

/// \int_0^c |y|^{-gamma} g(y) dy for c != 0 and gamma < 1 (c < 0 integrates
/// over [c, 0]). The power factor is removed exactly by y = c u^{1/(1-gamma)}
/// so only the smooth part g is sampled.
Result power_singular(const Integrand& g, double c, double gamma, double rtol, double atol = 0.0);

/// \int_{mid-half}^{mid+half} |y|^power dy in closed form (power > -1), kept
/// accurate when half << |mid|.
double power_interval(double mid, double half, double power);

}  // namespace fujita::quad
