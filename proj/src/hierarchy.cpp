#include "hsl/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hsl/estfun.hpp"

namespace hsl::hier {

namespace {

using grid::Grid;
using grid::ProfileField;
using grid::RealField;

// Sources whose norm stays below this are treated as identically zero when
// fitting the extrapolation tail (zero-coupling runs produce exact zeros).
constexpr double kZeroSource = 1e-280;
constexpr double kMinTailExponent = 1.05;

// Integral from each node to infinity of an integrand sampled on the mesh:
// cumulative quadrature in tau over the mesh plus a power-law tail whose
// exponent is fitted on the last decade of the integrand's norm.
template <typename A>
std::vector<A> integral_to_infinity(const std::vector<A>& s,
                                    const timegrid::TimeGrid& tg) {
  const int nn = tg.nodes();
  std::vector<A> weighted;
  weighted.reserve(nn);
  for (int i = 0; i < nn; ++i) weighted.push_back(A(s[i] * tg.t(i)));
  const auto cum = timegrid::cumulative_samples(weighted, tg.dtau());

  const int fit_lo = std::max(0, tg.steps() - tg.steps_per_decade());
  std::vector<double> mags;
  for (int i = fit_lo; i <= tg.steps(); ++i) {
    mags.push_back(s[i].matrix().norm());
  }
  A tail(0.0 * s[0]);
  if (*std::max_element(mags.begin(), mags.end()) >= kZeroSource) {
    const double rho = -timegrid::fit_log_slope(mags, tg.dtau());
    if (rho <= kMinTailExponent) {
      throw TailFitError(
          "integrand decays too slowly on the last decade for a power-law "
          "tail extrapolation");
    }
    tail = A(s.back() * (tg.t_end() / (rho - 1.0)));
  }
  std::vector<A> out;
  out.reserve(nn);
  for (int i = 0; i < nn; ++i) out.push_back(A(cum.back() - cum[i] + tail));
  return out;
}

// Right-hand side of the phase equation at level m+1, evaluated at node i:
// (2t^2)^{-1} sum_j grad(phi_j).grad(phi_{m-j})
//   + t^{-gamma} sum_j g0(w_j, w_{m+1-j}).
Eigen::ArrayXd phase_rhs(const Hierarchy& h, int m, int i, double t) {
  const Grid g = h.w[0][i].grid;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(g.size());
  if (m >= 0) {
    RealField eik = grid::zero_real(g);
    for (int j = 0; j <= m; ++j) {
      eik.values += grid::gradient_dot(h.phi[j][i], h.phi[m - j][i]).values;
    }
    out += eik.values / (2.0 * t * t);
  }
  RealField inter = grid::zero_real(g);
  for (int j = 0; j <= m + 1; ++j) {
    inter.values += grid::interaction_potential(h.w[j][i], h.w[m + 1 - j][i],
                                                h.params.lambda, h.params.mu)
                        .values;
  }
  out += std::pow(t, -h.params.gamma) * inter.values;
  return out;
}

double safe_ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

}  // namespace

ProfileField Hierarchy::amplitude_sum(int m, int node) const {
  if (m < 0 || m > p + 1 || node < 0 || node >= tg.nodes()) {
    throw DomainError("amplitude_sum index out of range");
  }
  ProfileField out = w[0][node];
  for (int j = 1; j <= m; ++j) out.values += w[j][node].values;
  return out;
}

RealField Hierarchy::phase_sum(int m, int node) const {
  if (m < -1 || m > p || node < 0 || node >= tg.nodes()) {
    throw DomainError("phase_sum index out of range");
  }
  // The empty partial sum (m = -1) is identically zero; it drives the
  // degenerate order-zero transport pipeline.
  if (m == -1) return grid::zero_real(params.make_grid());
  RealField out = phi[0][node];
  for (int j = 1; j <= m; ++j) out.values += phi[j][node].values;
  return out;
}

Hierarchy solve_hierarchy(const ProfileField& w_plus, int p,
                          const timegrid::TimeGrid& tg,
                          const ModelParams& params) {
  params.validate();
  const Grid g = params.make_grid();
  if (!(w_plus.grid == g)) {
    throw DomainError("seed grid does not match the model parameters");
  }
  if (p < 0) throw DomainError("hierarchy depth must be nonnegative");
  if (params.k + p + 1 > g.dealias_cutoff()) {
    throw DomainError(
        "hierarchy depth needs more spectral derivatives than the dealiased "
        "band resolves");
  }
  grid::require_band_limited(w_plus, "amplitude seed");

  const int nn = tg.nodes();
  Hierarchy h{params, tg, p, {}, {}, {}};
  h.w.assign(p + 2, {});
  h.phi.assign(p + 1, {});
  h.w[0].assign(nn, w_plus);

  for (int m = -1; m <= p; ++m) {
    if (m >= 0) {
      // Amplitude correction w_{m+1}: transport source integrated from t to
      // infinity, with zero value at infinity.
      std::vector<Eigen::ArrayXcd> src;
      src.reserve(nn);
      for (int i = 0; i < nn; ++i) {
        const double t = tg.t(i);
        ProfileField acc = grid::zero_profile(g);
        for (int j = 0; j <= m; ++j) {
          acc.values += grid::transport_apply(h.phi[j][i], h.w[m - j][i]).values;
        }
        src.push_back(acc.values / (2.0 * t * t));
      }
      const auto remaining = integral_to_infinity(src, tg);
      auto& level = h.w[m + 1];
      level.reserve(nn);
      for (int i = 0; i < nn; ++i) {
        level.push_back(ProfileField{g, -remaining[i]});
      }
    }
    if (m + 1 <= p) {
      // Phase correction phi_{m+1}: cumulative integral from t = 1, so
      // phi_{m+1}(1) = 0 exactly.
      std::vector<Eigen::ArrayXd> src;
      src.reserve(nn);
      for (int i = 0; i < nn; ++i) {
        const double t = tg.t(i);
        src.push_back(phase_rhs(h, m, i, t) * t);
      }
      const auto cum = timegrid::cumulative_samples(src, tg.dtau());
      auto& level = h.phi[m + 1];
      level.reserve(nn);
      for (int i = 0; i < nn; ++i) level.push_back(RealField{g, cum[i]});
    }
  }
  return h;
}

void solve_psi_tail(Hierarchy& h) {
  if (!((h.p + 2) * h.params.gamma > 1.0)) {
    throw DomainError("phase tail requires (p+2)*gamma > 1");
  }
  if (!h.psi_tail.empty()) return;
  const Grid g = h.params.make_grid();
  const int nn = h.tg.nodes();
  std::vector<Eigen::ArrayXd> src;
  src.reserve(nn);
  for (int i = 0; i < nn; ++i) {
    src.push_back(phase_rhs(h, h.p, i, h.tg.t(i)));
  }
  const auto remaining = integral_to_infinity(src, h.tg);
  h.psi_tail.reserve(nn);
  for (int i = 0; i < nn; ++i) {
    h.psi_tail.push_back(RealField{g, -remaining[i]});
  }
}

DecayReport hierarchy_decay_report(const Hierarchy& h, int k, int ell) {
  est::EstContext ctx(h.params.gamma);
  const int nn = h.tg.nodes();
  DecayReport report;
  report.sup_ratio_psi = std::numeric_limits<double>::quiet_NaN();
  report.drift_psi = std::numeric_limits<double>::quiet_NaN();
  for (int m = 0; m <= h.p; ++m) {
    const int w_order = std::max(0, std::min(k, k + h.p - m - 1));
    std::vector<double> rw, rp;
    rw.reserve(nn);
    rp.reserve(nn);
    for (int i = 0; i < nn; ++i) {
      const double t = h.tg.t(i);
      DecayRow row;
      row.m = m;
      row.t = t;
      row.norm_w = grid::sobolev_norm(h.w[m + 1][i], w_order);
      row.env_w = est::eval_Q(ctx, m, t);
      row.ratio_w = safe_ratio(row.norm_w, row.env_w);
      row.norm_phi = grid::phase_norm(h.phi[m][i], ell);
      row.env_phi = est::eval_N(ctx, m, t);
      row.ratio_phi = safe_ratio(row.norm_phi, row.env_phi);
      rw.push_back(row.ratio_w);
      rp.push_back(row.ratio_phi);
      report.rows.push_back(row);
    }
    LevelSummary s;
    s.m = m;
    s.sup_ratio_w = *std::max_element(rw.begin(), rw.end());
    s.drift_w = timegrid::drift_factor(rw, h.tg.steps_per_decade());
    s.sup_ratio_phi = *std::max_element(rp.begin(), rp.end());
    s.drift_phi = timegrid::drift_factor(rp, h.tg.steps_per_decade());
    report.summary.push_back(s);
  }
  if (!h.psi_tail.empty()) {
    const int psi_order = std::max(0, ell - 1);
    std::vector<double> rr;
    rr.reserve(nn);
    for (int i = 0; i < nn; ++i) {
      PsiRow row;
      row.t = h.tg.t(i);
      row.norm = grid::phase_norm(h.psi_tail[i], psi_order);
      row.env = est::eval_P(ctx, h.p, row.t);
      row.ratio = safe_ratio(row.norm, row.env);
      rr.push_back(row.ratio);
      report.psi_rows.push_back(row);
    }
    report.sup_ratio_psi = *std::max_element(rr.begin(), rr.end());
    report.drift_psi = timegrid::drift_factor(rr, h.tg.steps_per_decade());
  }
  return report;
}

double hierarchy_gauge_check(const ProfileField& w_plus, const RealField& sigma,
                             int p, const timegrid::TimeGrid& tg,
                             const ModelParams& params) {
  if (!(sigma.grid == w_plus.grid)) {
    throw DomainError("twist field grid does not match the seed");
  }
  ProfileField twisted = w_plus;
  if (!(sigma.values == 0.0).all()) {
    Eigen::ArrayXcd rot(sigma.values.size());
    rot.real() = sigma.values.cos();
    rot.imag() = sigma.values.sin();
    twisted.values *= rot;
    twisted = grid::band_limit(twisted);
  }
  Hierarchy a = solve_hierarchy(w_plus, p, tg, params);
  Hierarchy b = solve_hierarchy(twisted, p, tg, params);
  const bool with_tail = (p + 2) * params.gamma > 1.0;
  if (with_tail) {
    solve_psi_tail(a);
    solve_psi_tail(b);
  }
  const int order = std::max(0, params.ell - 1);
  double worst = 0.0;
  const int nn = tg.nodes();
  for (int m = 0; m <= p; ++m) {
    for (int i = 0; i < nn; ++i) {
      RealField diff{a.phi[m][i].grid,
                     a.phi[m][i].values - b.phi[m][i].values};
      const double dev = grid::phase_norm(diff, order) /
                         (1.0 + grid::phase_norm(a.phi[m][i], order));
      worst = std::max(worst, dev);
    }
  }
  if (with_tail) {
    for (int i = 0; i < nn; ++i) {
      RealField diff{a.psi_tail[i].grid,
                     a.psi_tail[i].values - b.psi_tail[i].values};
      const double dev = grid::phase_norm(diff, order) /
                         (1.0 + grid::phase_norm(a.psi_tail[i], order));
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

}  // namespace hsl::hier
