#include "hsl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hsl/errors.hpp"

namespace hsl::quad {
namespace {

// (G7,K15) Gauss-Kronrod pair, QUADPACK dqk15 constants.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b;
  double value;
  double error;
};

Panel eval_panel(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - half * kXgk[i]);
    fv[14 - i] = f(c + half * kXgk[i]);
  }
  fv[7] = f(c);
  double k15 = kWgk[7] * fv[7];
  double g7 = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    k15 += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) g7 += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  return Panel{a, b, k15 * half, std::abs((k15 - g7) * half)};
}

QuadResult adapt(const Integrand& f, double a, double b, double rel_tol,
                 int max_panels) {
  QuadResult out;
  if (a == b) return out;
  std::vector<Panel> panels;
  panels.push_back(eval_panel(f, a, b));
  out.panels = 1;
  while (true) {
    double total = 0.0, err = 0.0;
    for (const Panel& p : panels) {
      total += p.value;
      err += p.error;
    }
    const double goal = rel_tol * std::max(std::abs(total), 1e-300);
    if (err <= goal) {
      out.value = total;
      out.error = err;
      return out;
    }
    if (static_cast<int>(panels.size()) >= max_panels)
      throw QuadratureError("adaptive quadrature: panel budget exhausted", err);
    auto worst = std::max_element(
        panels.begin(), panels.end(),
        [](const Panel& x, const Panel& y) { return x.error < y.error; });
    const double mid = 0.5 * (worst->a + worst->b);
    if (mid <= std::min(worst->a, worst->b) ||
        mid >= std::max(worst->a, worst->b))
      throw QuadratureError("adaptive quadrature: interval too narrow to split",
                            err);
    Panel left = eval_panel(f, worst->a, mid);
    Panel right = eval_panel(f, mid, worst->b);
    *worst = left;
    panels.push_back(right);
    out.panels += 2;
  }
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, double rel_tol,
                     int max_panels) {
  if (a <= b) return adapt(f, a, b, rel_tol, max_panels);
  QuadResult r = adapt(f, b, a, rel_tol, max_panels);
  r.value = -r.value;
  return r;
}

QuadResult integrate_log(const Integrand& f, double t_a, double t_b,
                         double rel_tol, int max_panels) {
  if (t_a <= 0.0 || t_b <= 0.0)
    throw DomainError("integrate_log: endpoints must be positive");
  auto g = [&f](double tau) {
    const double t = std::exp(tau);
    return f(t) * t;
  };
  return integrate(g, std::log(t_a), std::log(t_b), rel_tol, max_panels);
}

QuadResult integrate_to_inf(const Integrand& f, double t, double rel_tol,
                            double endpoint_power, int max_panels) {
  if (t <= 0.0) throw DomainError("integrate_to_inf: lower endpoint <= 0");
  if (endpoint_power <= 0.0)
    throw DomainError("integrate_to_inf: endpoint power must be positive");
  // u = 1/t1, then u = v^q with q chosen so the endpoint exponent q*alpha - 1
  // is at least 1 (regular vanishing integrand at v = 0).
  const int q = std::max(1, static_cast<int>(std::ceil(2.0 / endpoint_power)));
  const double V = std::pow(1.0 / t, 1.0 / q);
  auto g = [&f, q](double v) {
    if (v <= 0.0) return 0.0;
    const double t1 = std::pow(v, -q);
    if (!std::isfinite(t1)) return 0.0;
    const double fv = f(t1);
    // f(t1) * t1^2 * q * v^(q-1), with t1 = v^-q
    return fv * t1 * t1 * q * std::pow(v, q - 1);
  };
  return integrate(g, 0.0, V, rel_tol, max_panels);
}

}  // namespace hsl::quad
