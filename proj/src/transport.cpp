#include "hsl/transport.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "hsl/estfun.hpp"

namespace hsl::transport {

namespace {

using grid::ProfileField;
using grid::RealField;

// Cubic through the four nodes nearest the midpoint of interval
// [node, node+1], evaluated at that midpoint.  The stencil clamps at the
// mesh ends, so the first and last intervals reuse the one-sided cubic.
RealField phase_at_half(const std::vector<RealField>& phi, int node) {
  const int n = static_cast<int>(phi.size());
  const int base = std::clamp(node - 1, 0, n - 4);
  const double x = (node - base) + 0.5;
  RealField out = grid::zero_real(phi[0].grid);
  for (int j = 0; j < 4; ++j) {
    double wgt = 1.0;
    for (int m = 0; m < 4; ++m) {
      if (m != j) wgt *= (x - m) / (j - m);
    }
    out.values += wgt * phi[base + j].values;
  }
  return out;
}

// Shared backward fourth-order march in log-time.  `rhs(phi_t, t, u)` is the
// log-time derivative of the state.  The midpoint-rule companion (second
// order, reusing stage two) provides the rejection estimate.
template <typename Field, typename Rhs>
std::vector<Field> march_backward(const Field& data,
                                  const std::vector<RealField>& phi,
                                  const timegrid::TimeGrid& tg,
                                  double step_tol, Rhs rhs) {
  const int nn = tg.nodes();
  if (static_cast<int>(phi.size()) != nn) {
    throw DomainError("phase trajectory length must match the time mesh");
  }
  if (nn < 4) {
    throw DomainError(
        "backward transport needs at least four mesh nodes for the phase "
        "interpolation");
  }
  for (const RealField& f : phi) {
    if (!(f.grid == data.grid)) {
      throw DomainError("phase trajectory grid does not match the data");
    }
  }
  if (!(step_tol > 0.0)) throw DomainError("step tolerance must be positive");

  const double h = -tg.dtau();
  std::vector<Field> out(nn, data);
  for (int i = nn - 1; i > 0; --i) {
    const Field& cur = out[i];
    const RealField phim = phase_at_half(phi, i - 1);
    const double t_mid =
        std::pow(10.0, (i - 0.5) / tg.steps_per_decade());

    const Field k1 = rhs(phi[i], tg.t(i), cur);
    Field u{cur.grid, cur.values + (0.5 * h) * k1.values};
    const Field k2 = rhs(phim, t_mid, u);
    u.values = cur.values + (0.5 * h) * k2.values;
    const Field k3 = rhs(phim, t_mid, u);
    u.values = cur.values + h * k3.values;
    const Field k4 = rhs(phi[i - 1], tg.t(i - 1), u);

    Field next{cur.grid,
               cur.values + (h / 6.0) * (k1.values + 2.0 * k2.values +
                                         2.0 * k3.values + k4.values)};
    const Field gap{cur.grid, next.values - (cur.values + h * k2.values)};
    if (grid::l2_norm(gap) > step_tol * (1.0 + grid::l2_norm(cur))) {
      throw StepRejectedError(
          "local error estimate of the backward transport step exceeds the "
          "tolerance; refine steps_per_decade",
          tg.t(i - 1));
    }
    out[i - 1] = std::move(next);
  }
  return out;
}

double safe_ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

// Pointwise u e^{-i theta}.
ProfileField unwind(const ProfileField& u, const RealField& theta) {
  Eigen::ArrayXcd rot(theta.values.size());
  rot.real() = theta.values.cos();
  rot.imag() = -theta.values.sin();
  return ProfileField{u.grid, u.values * rot};
}

}  // namespace

std::vector<ProfileField> solve_V(const ProfileField& w_plus,
                                  const std::vector<RealField>& phi,
                                  const timegrid::TimeGrid& tg,
                                  double step_tol) {
  grid::require_band_limited(w_plus, "amplitude data");
  return march_backward(
      w_plus, phi, tg, step_tol,
      [](const RealField& ph, double t, const ProfileField& u) {
        ProfileField r = grid::transport_apply(ph, u);
        r.values /= 2.0 * t;
        return r;
      });
}

std::vector<RealField> solve_chi(const RealField& psi_plus,
                                 const std::vector<RealField>& phi,
                                 const timegrid::TimeGrid& tg,
                                 double step_tol) {
  grid::require_band_limited(psi_plus, "phase data");
  return march_backward(psi_plus, phi, tg, step_tol,
                        [](const RealField& ph, double t, const RealField& u) {
                          RealField r = grid::gradient_dot(ph, u);
                          r.values /= t;
                          return r;
                        });
}

TransportReport compare_with_hierarchy(const std::vector<ProfileField>& V,
                                       const hier::Hierarchy& h, int k) {
  const int nn = h.tg.nodes();
  if (static_cast<int>(V.size()) != nn) {
    throw DomainError(
        "amplitude trajectory length must match the hierarchy mesh");
  }
  if (k < 0) throw DomainError("derivative order must be nonnegative");

  const est::EstContext ctx(h.params.gamma);
  const ProfileField& seed = h.w[0][0];
  const int seed_order = std::max(0, k - 1);

  TransportReport report;
  std::vector<double> rs, rq;
  for (int i = 0; i < nn; ++i) {
    if (!(V[i].grid == seed.grid)) {
      throw DomainError("amplitude trajectory grid does not match the "
                        "hierarchy");
    }
    const double t = h.tg.t(i);
    TransportRow row;
    row.t = t;
    const ProfileField dev_seed{seed.grid, V[i].values - seed.values};
    row.norm_dev_seed = grid::sobolev_norm(dev_seed, seed_order);
    row.env_seed = est::h_closed(h.params.gamma, t);
    row.ratio_seed = safe_ratio(row.norm_dev_seed, row.env_seed);
    const ProfileField sum = h.amplitude_sum(h.p, i);
    const ProfileField dev_sum{seed.grid, V[i].values - sum.values};
    row.norm_dev_sum = grid::sobolev_norm(dev_sum, k);
    row.env_sum = est::eval_Q(ctx, h.p, t);
    row.ratio_sum = safe_ratio(row.norm_dev_sum, row.env_sum);
    report.rows.push_back(row);
    rs.push_back(row.ratio_seed);
    rq.push_back(row.ratio_sum);
  }

  // Restrict the statistics to nodes at least one decade below the far end;
  // the terminal data forces the seed deviation to zero there.
  const int spd = h.tg.steps_per_decade();
  const int hi = std::max(1, h.tg.steps() - spd);
  rs.resize(hi + 1);
  rq.resize(hi + 1);
  report.sup_ratio_seed = *std::max_element(rs.begin(), rs.end());
  report.drift_seed = timegrid::drift_factor(rs, spd);
  report.sup_ratio_sum = *std::max_element(rq.begin(), rq.end());
  report.drift_sum = timegrid::drift_factor(rq, spd);
  return report;
}

std::vector<ChiRow> chi_deviation(const std::vector<RealField>& chi,
                                  const RealField& psi_plus, double gamma,
                                  int ell, const timegrid::TimeGrid& tg) {
  if (static_cast<int>(chi.size()) != tg.nodes()) {
    throw DomainError("phase trajectory length must match the time mesh");
  }
  const int order = std::max(0, ell - 1);
  std::vector<ChiRow> rows;
  for (int i = 0; i < tg.nodes(); ++i) {
    const double t = tg.t(i);
    const RealField dev{psi_plus.grid, chi[i].values - psi_plus.values};
    ChiRow row;
    row.t = t;
    row.norm_dev = grid::phase_norm(dev, order);
    row.env = est::h_closed(gamma, t);
    row.ratio = safe_ratio(row.norm_dev, row.env);
    rows.push_back(row);
  }
  return rows;
}

double l2_drift(const std::vector<ProfileField>& V) {
  if (V.empty()) throw DomainError("empty amplitude trajectory");
  const double ref = grid::l2_norm(V.back());
  double worst = 0.0;
  for (const ProfileField& f : V) {
    worst = std::max(worst, std::abs(grid::l2_norm(f) - ref));
  }
  return safe_ratio(worst, ref);
}

double gauge_check_transport(const ProfileField& w_plus,
                             const RealField& psi_plus,
                             const std::vector<RealField>& phi,
                             const timegrid::TimeGrid& tg, double step_tol) {
  if (!(psi_plus.grid == w_plus.grid)) {
    throw DomainError("phase data grid does not match the amplitude data");
  }

  // The zero-phase partner of (w_plus, psi_plus) carries the phase on the
  // amplitude: w_plus e^{-i psi_plus}, so that both describe the same
  // combination V e^{-i chi} at the far end.
  ProfileField twisted = w_plus;
  if (!(psi_plus.values == 0.0).all()) {
    Eigen::ArrayXcd rot(psi_plus.values.size());
    rot.real() = psi_plus.values.cos();
    rot.imag() = -psi_plus.values.sin();
    twisted.values *= rot;
    twisted = grid::band_limit(twisted);
  }

  const auto V = solve_V(w_plus, phi, tg, step_tol);
  const auto chi = solve_chi(psi_plus, phi, tg, step_tol);
  const auto Vt = solve_V(twisted, phi, tg, step_tol);
  const auto chit = solve_chi(grid::zero_real(w_plus.grid), phi, tg, step_tol);

  double worst = 0.0;
  for (int i = 0; i < tg.nodes(); ++i) {
    const ProfileField a = unwind(V[i], chi[i]);
    const ProfileField b = unwind(Vt[i], chit[i]);
    const ProfileField diff{a.grid, a.values - b.values};
    worst = std::max(worst, grid::l2_norm(diff));
  }
  return worst;
}

InfinityGap richardson_infinity_gap(const ProfileField& w_plus,
                                    const std::vector<RealField>& phi,
                                    const timegrid::TimeGrid& tg,
                                    double step_tol) {
  const int i_short = tg.nearest_node(tg.t_end() / 2.0);
  if (i_short < 3) {
    throw DomainError(
        "halved transport horizon leaves fewer than four mesh nodes");
  }
  const timegrid::TimeGrid tg_short(tg.t(i_short), tg.steps_per_decade());
  if (tg_short.steps() != i_short) {
    throw DomainError("halved transport horizon failed to land on the mesh");
  }
  const std::vector<RealField> phi_short(phi.begin(),
                                         phi.begin() + i_short + 1);

  const auto V_long = solve_V(w_plus, phi, tg, step_tol);
  const auto V_short = solve_V(w_plus, phi_short, tg_short, step_tol);

  double gap = 0.0;
  for (int i = 0; i <= i_short; ++i) {
    const ProfileField diff{w_plus.grid,
                            V_long[i].values - V_short[i].values};
    gap = std::max(gap, grid::l2_norm(diff));
  }
  return InfinityGap{gap, tg_short.t_end()};
}

}  // namespace hsl::transport
