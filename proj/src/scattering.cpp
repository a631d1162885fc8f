#include "hsl/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hsl/errors.hpp"
#include "hsl/estfun.hpp"

namespace hsl::scatter {

using grid::Grid;
using grid::ProfileField;
using grid::RealField;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSigmaGaugeTol = 1e-5;

int checked_node(const timegrid::TimeGrid& tg, double t, const char* what) {
  const int i = tg.nearest_node(t);
  if (std::abs(tg.t(i) - t) > 1e-9 * t) {
    throw DomainError(std::string(what) + " must sit on a mesh node");
  }
  return i;
}

// Unimodular factor exp(i theta) per sample.
Eigen::ArrayXcd unit_phase(const Eigen::ArrayXd& theta) {
  return theta.unaryExpr(
      [](double x) { return std::polar(1.0, x); });
}

// Exact interaction substep over [s1, s2]: the potential depends only on
// |psi|, which the rotation preserves, so freezing it is not an
// approximation within the substep.
Eigen::ArrayXcd interaction_rotation(const Grid& g, const Eigen::ArrayXcd& psi,
                                     double s1, double s2,
                                     const ModelParams& pm) {
  const ProfileField f{g, psi};
  const RealField pot = grid::interaction_potential(f, f, pm.lambda, pm.mu);
  const double dh0 =
      est::h0_closed(pm.gamma, s2) - est::h0_closed(pm.gamma, s1);
  return psi * unit_phase(-dh0 * pot.values);
}

// One Strang step of the profile equation between times t_a < t_b with the
// geometric midpoint: half interaction rotation, full free flow, half
// interaction rotation.
Eigen::ArrayXcd profile_step(const Grid& g, const Eigen::ArrayXcd& psi_in,
                             double t_a, double t_b, const ModelParams& pm) {
  const double t_m = std::sqrt(t_a * t_b);
  Eigen::ArrayXcd psi = interaction_rotation(g, psi_in, t_a, t_m, pm);
  psi = grid::laplacian_flow(ProfileField{g, std::move(psi)},
                             0.5 * (1.0 / t_a - 1.0 / t_b))
            .values;
  return interaction_rotation(g, psi, t_m, t_b, pm);
}

}  // namespace

double moving_lr_norm(const PhysicalSample& s, double r) {
  if (!(r >= 1.0)) {
    throw DomainError("moving-grid norms need an exponent of at least one");
  }
  if (std::isinf(r)) return s.values.abs().maxCoeff();
  return std::pow((s.values.abs().pow(r) * s.cell).sum(), 1.0 / r);
}

PhysicalSample lambda_map(const ProfileField& w, const RealField& phi,
                          double t) {
  if (!(w.grid == phi.grid)) {
    throw DomainError("the amplitude and phase live on different grids");
  }
  if (!(t >= 1.0)) {
    throw DomainError("the reconstruction time must be at least one");
  }
  const Grid& g = w.grid;
  const int n = g.dim;
  const int N = g.samples;
  const double dy = g.length / N;
  PhysicalSample out;
  out.t = t;
  out.cell = std::pow(t * dy, n);
  out.points.resize(g.size(), n);
  out.values.resize(g.size());
  const std::complex<double> front =
      std::polar(std::pow(t, -0.5 * n), -0.25 * kPi * n);
  for (std::int64_t idx = 0; idx < g.size(); ++idx) {
    double y2 = 0.0;
    std::int64_t rest = idx;
    for (int axis = n - 1; axis >= 0; --axis) {
      const int j = static_cast<int>(rest % N);
      rest /= N;
      const double y = g.signed_mode(j) * dy;
      out.points(idx, axis) = t * y;
      y2 += y * y;
    }
    out.values[idx] = front *
                      std::polar(1.0, 0.5 * t * y2 - phi.values[idx]) *
                      w.values[idx];
  }
  return out;
}

double gauge_equiv(const ProfileField& w, const RealField& phi,
                   const ProfileField& w2, const RealField& phi2) {
  const Grid& g = w.grid;
  if (!(phi.grid == g) || !(w2.grid == g) || !(phi2.grid == g)) {
    throw DomainError("gauge comparison needs matching grids");
  }
  const Eigen::ArrayXcd diff =
      w.values * unit_phase(-phi.values) - w2.values * unit_phase(-phi2.values);
  return grid::l2_norm(ProfileField{g, diff});
}

bool gauge_equivalent(const ProfileField& w, const RealField& phi,
                      const ProfileField& w2, const RealField& phi2,
                      double tol) {
  return gauge_equiv(w, phi, w2, phi2) <= tol;
}

int DirectRun::last_node() const {
  return first_node + static_cast<int>(psi.size()) - 1;
}

bool DirectRun::covers(int node) const {
  return node >= first_node && node <= last_node();
}

const ProfileField& DirectRun::at_node(int node) const {
  if (!covers(node)) {
    throw DomainError("node " + std::to_string(node) +
                      " lies outside the profile run");
  }
  return psi[static_cast<std::size_t>(node - first_node)];
}

DirectRun direct_profile_solve(const ProfileField& psi0, double t0,
                               const timegrid::TimeGrid& tg,
                               const ModelParams& params, double step_tol) {
  params.validate();
  if (!(psi0.grid == params.make_grid())) {
    throw DomainError("the profile seed must live on the model grid");
  }
  if (!(step_tol > 0.0)) {
    throw DomainError("step tolerance must be positive");
  }
  const int i0 = checked_node(tg, t0, "the start time");
  const Grid g = psi0.grid;

  DirectRun run;
  run.first_node = i0;
  run.times.push_back(tg.t(i0));
  run.psi.push_back(psi0);
  const double mass0 = grid::l2_norm(psi0);
  double worst = 0.0;
  Eigen::ArrayXcd psi = psi0.values;
  for (int i = i0; i < tg.steps(); ++i) {
    const double t_a = tg.t(i);
    const double t_b = tg.t(i + 1);
    const double t_m = std::sqrt(t_a * t_b);
    const Eigen::ArrayXcd full = profile_step(g, psi, t_a, t_b, params);
    const Eigen::ArrayXcd halves = profile_step(
        g, profile_step(g, psi, t_a, t_m, params), t_m, t_b, params);
    const double gap = grid::l2_norm(ProfileField{g, full - halves});
    if (gap > step_tol * (1.0 + grid::l2_norm(ProfileField{g, psi}))) {
      throw StepRejectedError(
          "local error estimate of the profile step exceeds the tolerance; "
          "refine steps_per_decade",
          t_b);
    }
    psi = full;
    run.times.push_back(t_b);
    run.psi.push_back(ProfileField{g, psi});
    const double mass = grid::l2_norm(run.psi.back());
    const double dev = mass0 > 0.0 ? std::abs(mass - mass0) / mass0
                                   : std::abs(mass - mass0);
    worst = std::max(worst, dev);
  }
  run.mass_drift = worst;
  return run;
}

OmegaOutput omega(const ProfileField& w_plus, int p,
                  const std::vector<double>& t0_sequence,
                  const timegrid::TimeGrid& tg, const ModelParams& params,
                  double step_tol) {
  params.validate();
  OmegaOutput out{aux::make_scaffold(w_plus,
                                     grid::zero_real(params.make_grid()), p,
                                     tg, params, step_tol),
                  aux::WaveOpResult{}};
  out.result = aux::omega0(out.scaffold, t0_sequence, step_tol);
  return out;
}

double initial_separation(const aux::AuxTrajectory& a,
                          const aux::AuxTrajectory& b) {
  const int lo = std::max(a.first_node, b.first_node);
  if (lo > std::min(a.last_node(), b.last_node())) {
    throw DomainError("the trajectories share no nodes");
  }
  const aux::AuxState& sa = a.at_node(lo);
  const aux::AuxState& sb = b.at_node(lo);
  return gauge_equiv(sa.w, sa.phi, sb.w, sb.phi);
}

ErrorReport asymptotic_error_report(const aux::AuxTrajectory& traj,
                                    const hier::Hierarchy& h,
                                    const std::vector<double>& r_list) {
  if (traj.states.empty()) {
    throw DomainError("the error report needs a nonempty trajectory");
  }
  const Grid g = traj.states.front().w.grid;
  if (!(g == h.params.make_grid())) {
    throw DomainError("the trajectory and the hierarchy use different grids");
  }
  const int n = h.params.n;
  const int k = h.params.k;
  const double top = std::min(static_cast<double>(k), 0.5 * n);
  ErrorReport report;
  report.r_list = r_list;
  for (const double r : r_list) {
    if (!(r >= 1.0)) {
      throw DomainError("r = " + std::to_string(r) +
                        " is not a norm exponent");
    }
    const double delta = std::isinf(r) ? 0.5 * n : 0.5 * n - n / r;
    const bool at_top_forbidden = (2 * k == n) && !(delta < top);
    if (delta < 0.0 || delta > top || at_top_forbidden) {
      throw DomainError("r = " + std::to_string(r) +
                        " puts the decay exponent outside its window");
    }
    report.delta.push_back(delta);
  }

  const est::EstContext ctx(h.params.gamma);
  const ProfileField& target = h.w.at(0).at(0);
  for (int i = traj.first_node; i <= traj.last_node(); ++i) {
    const aux::AuxState& s = traj.at_node(i);
    const RealField gap{g, h.phase_sum(h.p, i).values - s.phi.values};
    const ProfileField diff{
        g, s.w.values * unit_phase(gap.values) - target.values};
    ErrorRow row;
    row.t = s.t;
    row.Ek = grid::sobolev_norm(diff, k);
    row.E0 = grid::lp_norm(diff, 2.0);
    row.Pp = est::eval_P(ctx, h.p, s.t);
    row.ratio = row.Ek / row.Pp;
    for (std::size_t j = 0; j < r_list.size(); ++j) {
      row.lr.push_back(grid::lp_norm(diff, r_list[j]));
      row.lr_ratio.push_back(row.lr.back() / row.Pp);
    }
    report.rows.push_back(std::move(row));
  }

  std::vector<double> ratios;
  ratios.reserve(report.rows.size());
  for (const ErrorRow& row : report.rows) ratios.push_back(row.ratio);
  report.drift = timegrid::drift_factor(ratios, h.tg.steps_per_decade());
  return report;
}

SigmaResult sigma_extract(const aux::AuxTrajectory& a,
                          const aux::AuxTrajectory& b,
                          const ModelParams& params) {
  if (a.states.empty() || b.states.empty()) {
    throw DomainError("phase-offset extraction needs nonempty trajectories");
  }
  const Grid g = a.states.front().w.grid;
  if (!(g == b.states.front().w.grid)) {
    throw DomainError("the trajectories live on different grids");
  }
  const int lo = std::max(a.first_node, b.first_node);
  const int hi = std::min(a.last_node(), b.last_node());
  if (hi <= lo) {
    throw DomainError("the trajectories share fewer than two nodes");
  }
  for (int i = lo; i <= hi; ++i) {
    const aux::AuxState& sa = a.at_node(i);
    const aux::AuxState& sb = b.at_node(i);
    if (gauge_equiv(sa.w, sa.phi, sb.w, sb.phi) > kSigmaGaugeTol) {
      throw DomainError(
          "the trajectories are not gauge equivalent at t = " +
          std::to_string(sa.t));
    }
  }

  const aux::AuxState& ea = a.at_node(hi);
  const aux::AuxState& eb = b.at_node(hi);
  SigmaResult out{RealField{g, eb.phi.values - ea.phi.values}, 0.0, 0.0};

  const double t_floor = ea.t / 10.0 * (1.0 - 1e-12);
  for (int i = lo; i <= hi; ++i) {
    const aux::AuxState& sa = a.at_node(i);
    if (sa.t < t_floor) continue;
    const aux::AuxState& sb = b.at_node(i);
    const RealField rem{
        g, (sb.phi.values - sa.phi.values) - out.sigma.values};
    const double res = grid::phase_norm(rem, params.ell - 2) /
                       est::h_closed(params.gamma, sa.t);
    out.residual = std::max(out.residual, res);
  }

  const Eigen::ArrayXcd rotated = ea.w.values * unit_phase(out.sigma.values);
  out.mismatch = grid::l2_norm(ProfileField{g, eb.w.values - rotated});
  return out;
}

}  // namespace hsl::scatter
