#pragma once

#include <functional>

namespace hsl::quad {

using Integrand = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // absolute error estimate
  int panels = 0;       // number of G7/K15 panels evaluated
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval [a,b].  Subdivides the
// worst panel until the summed error estimate drops below
// rel_tol * max(|integral|, floor) or the panel budget is exhausted
// (then throws QuadratureError).  a > b integrates with a sign flip.
QuadResult integrate(const Integrand& f, double a, double b, double rel_tol,
                     int max_panels = 4000);

// Same, but integrates in the substituted variable tau = log t:
// \int_{t_a}^{t_b} f(t) dt = \int g(tau) dtau with g(tau) = f(e^tau) e^tau.
// Natural variable for integrands that are products of powers of t.
QuadResult integrate_log(const Integrand& f, double t_a, double t_b,
                         double rel_tol, int max_panels = 4000);

// Improper integral \int_t^inf f(t1) dt1 via the substitution t1 = 1/u,
// integrating u over (0, 1/t].  `endpoint_power` is (a bound on) the algebraic
// behaviour of the substituted integrand near u = 0: if
// f(1/u)/u^2 ~ u^(endpoint_power - 1), a second substitution u = v^q with
// q*endpoint_power >= 2 flattens the endpoint so adaptive bisection converges
// at full order.  endpoint_power must be > 0 (integrability).
QuadResult integrate_to_inf(const Integrand& f, double t, double rel_tol,
                            double endpoint_power, int max_panels = 4000);

}  // namespace hsl::quad
