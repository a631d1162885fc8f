#include "hsl/auxsys.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "hsl/estfun.hpp"
#include "hsl/transport.hpp"

namespace hsl::aux {

using grid::Grid;
using grid::ProfileField;
using grid::RealField;

namespace {

constexpr double kBlowUpFactor = 1e6;
constexpr double kCauchySlack = 1.5;
constexpr double kCauchyFloor = 1e-12;

double safe_ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

// Slope of the non-free part of the system in tau = log t:
//   dw/dtau   = (2t)^{-1} (2 grad(phi).grad + Lap(phi)) w
//   dphi/dtau = (2t)^{-1} |grad phi|^2 + t^{1-gamma} g0(w, w).
struct PairSlope {
  Eigen::ArrayXcd w;
  Eigen::ArrayXd phi;
};

PairSlope slope(const Grid& g, const Eigen::ArrayXcd& wv,
                const Eigen::ArrayXd& phiv, double t,
                const ModelParams& pm) {
  const ProfileField w{g, wv};
  const RealField phi{g, phiv};
  PairSlope out;
  out.w = grid::transport_apply(phi, w).values / (2.0 * t);
  out.phi = grid::gradient_dot(phi, phi).values / (2.0 * t) +
            std::pow(t, 1.0 - pm.gamma) *
                grid::interaction_potential(w, w, pm.lambda, pm.mu).values;
  return out;
}

struct StepResult {
  Eigen::ArrayXcd w;
  Eigen::ArrayXd phi;
};

// One Strang step between adjacent nodes: exact free half flow, classical
// fourth-order step of the remaining terms (midpoint companion as the
// rejection estimate), exact free half flow.
StepResult strang_step(const Grid& g, const Eigen::ArrayXcd& w_in,
                       const Eigen::ArrayXd& phi_in, double t_a, double t_mid,
                       double t_b, double h, const ModelParams& pm,
                       double step_tol) {
  ProfileField w =
      grid::laplacian_flow(ProfileField{g, w_in}, 0.5 * (1.0 / t_a -
                                                         1.0 / t_mid));
  const PairSlope k1 = slope(g, w.values, phi_in, t_a, pm);
  const PairSlope k2 = slope(g, w.values + 0.5 * h * k1.w,
                             phi_in + 0.5 * h * k1.phi, t_mid, pm);
  const PairSlope k3 = slope(g, w.values + 0.5 * h * k2.w,
                             phi_in + 0.5 * h * k2.phi, t_mid, pm);
  const PairSlope k4 = slope(g, w.values + h * k3.w, phi_in + h * k3.phi,
                             t_b, pm);
  StepResult out;
  out.w = w.values + (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
  out.phi =
      phi_in + (h / 6.0) * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
  const double gap_w =
      grid::l2_norm(ProfileField{g, out.w - (w.values + h * k2.w)});
  const double gap_phi =
      grid::l2_norm(RealField{g, out.phi - (phi_in + h * k2.phi)});
  if (gap_w > step_tol * (1.0 + grid::l2_norm(ProfileField{g, w.values})) ||
      gap_phi > step_tol * (1.0 + grid::l2_norm(RealField{g, phi_in}))) {
    throw StepRejectedError(
        "local error estimate of the amplitude/phase step exceeds the "
        "tolerance; refine steps_per_decade",
        t_b);
  }
  out.w = grid::laplacian_flow(ProfileField{g, std::move(out.w)},
                               0.5 * (1.0 / t_mid - 1.0 / t_b))
              .values;
  return out;
}

struct MarchOutcome {
  std::vector<AuxState> states;  // in march order, starting with the seed
  bool blew_up = false;
  double t_blow = 0.0;
};

MarchOutcome march(const AuxState& s0, int i0, const timegrid::TimeGrid& tg,
                   int stride, const ModelParams& pm, double step_tol) {
  const Grid g = s0.w.grid;
  const double scale0 = grid::l2_norm(s0.w) + grid::sup_norm(s0.phi);
  const double bound = kBlowUpFactor * (scale0 > 0.0 ? scale0 : 1.0);
  const int spd = tg.steps_per_decade();
  const int last = stride > 0 ? tg.steps() : 0;
  MarchOutcome out;
  out.states.push_back(s0);
  Eigen::ArrayXcd wv = s0.w.values;
  Eigen::ArrayXd phiv = s0.phi.values;
  for (int i = i0; i != last; i += stride) {
    const double t_a = tg.t(i);
    const double t_b = tg.t(i + stride);
    const double t_mid =
        std::pow(10.0, (i + 0.5 * stride) / static_cast<double>(spd));
    const double h = stride * tg.dtau();
    StepResult next =
        strang_step(g, wv, phiv, t_a, t_mid, t_b, h, pm, step_tol);
    const double wn = grid::l2_norm(ProfileField{g, next.w});
    const double pn = grid::sup_norm(RealField{g, next.phi});
    if (!(wn <= bound) || !(pn <= bound)) {
      out.blew_up = true;
      out.t_blow = t_b;
      return out;
    }
    wv = std::move(next.w);
    phiv = std::move(next.phi);
    out.states.push_back(AuxState{t_b, ProfileField{g, wv},
                                  RealField{g, phiv}});
  }
  return out;
}

int checked_node(const timegrid::TimeGrid& tg, double t, const char* what) {
  const int i = tg.nearest_node(t);
  if (std::abs(tg.t(i) - t) > 1e-9 * t) {
    throw DomainError(std::string(what) + " must sit on a mesh node");
  }
  return i;
}

void validate_state(const AuxState& s, const ModelParams& pm) {
  pm.validate();
  const Grid g = pm.make_grid();
  if (!(s.w.grid == g) || !(s.phi.grid == g)) {
    throw DomainError("state fields must live on the model grid");
  }
  grid::require_band_limited(s.w, "amplitude state");
  grid::require_band_limited(s.phi, "phase state");
}

}  // namespace

int AuxTrajectory::last_node() const {
  return first_node + static_cast<int>(states.size()) - 1;
}

bool AuxTrajectory::covers(int node) const {
  return node >= first_node && node <= last_node();
}

const AuxState& AuxTrajectory::at_node(int node) const {
  if (!covers(node)) {
    throw DomainError("trajectory does not cover the requested node");
  }
  return states[static_cast<std::size_t>(node - first_node)];
}

AuxTrajectory integrate(const AuxState& state0, const timegrid::TimeGrid& tg,
                        Direction direction, const ModelParams& params,
                        double step_tol) {
  validate_state(state0, params);
  if (!(step_tol > 0.0)) {
    throw DomainError("step tolerance must be positive");
  }
  const int i0 = checked_node(tg, state0.t, "the start time");
  const int stride = direction == Direction::Forward ? 1 : -1;
  MarchOutcome got = march(state0, i0, tg, stride, params, step_tol);
  if (got.blew_up) {
    throw BlowUpError(
        "the amplitude/phase pair grew beyond a million times its initial "
        "size",
        got.t_blow);
  }
  AuxTrajectory traj;
  if (stride > 0) {
    traj.first_node = i0;
    traj.states = std::move(got.states);
  } else {
    traj.first_node = i0 - static_cast<int>(got.states.size()) + 1;
    traj.states.assign(std::make_move_iterator(got.states.rbegin()),
                       std::make_move_iterator(got.states.rend()));
  }
  return traj;
}

double mass_drift(const AuxTrajectory& traj) {
  if (traj.states.empty()) {
    throw DomainError("mass drift needs a nonempty trajectory");
  }
  const double ref = grid::l2_norm(traj.states.front().w);
  double worst = 0.0;
  for (const AuxState& s : traj.states) {
    worst = std::max(worst, std::abs(grid::l2_norm(s.w) - ref));
  }
  return ref > 0.0 ? worst / ref : worst;
}

Scaffold make_scaffold(const grid::ProfileField& w_plus,
                       const grid::RealField& psi_plus, int p,
                       const timegrid::TimeGrid& tg, const ModelParams& params,
                       double step_tol) {
  params.validate();
  if (!((p + 2) * params.gamma > 1.0)) {
    throw DomainError(
        "the wave-operator construction needs (p + 2) * gamma > 1");
  }
  if (!(psi_plus.grid == w_plus.grid)) {
    throw DomainError("amplitude and phase data must share one grid");
  }
  grid::require_band_limited(psi_plus, "phase data");
  Scaffold sc{hier::solve_hierarchy(w_plus, p, tg, params), {}, {}, {},
              psi_plus, {}, {}};
  sc.phase.reserve(tg.nodes());
  for (int i = 0; i < tg.nodes(); ++i) {
    sc.phase.push_back(sc.h.phase_sum(p - 1, i));
  }
  sc.V = transport::solve_V(w_plus, sc.phase, tg, step_tol);
  sc.chi = transport::solve_chi(psi_plus, sc.phase, tg, step_tol);
  const est::EstContext ctx(params.gamma);
  sc.Qp.reserve(tg.nodes());
  sc.Pp.reserve(tg.nodes());
  for (int i = 0; i < tg.nodes(); ++i) {
    sc.Qp.push_back(est::eval_Q(ctx, p, tg.t(i)));
    sc.Pp.push_back(est::eval_P(ctx, p, tg.t(i)));
  }
  return sc;
}

LocalRun local_wave_op(const Scaffold& sc, double t0, double step_tol) {
  if (!(step_tol > 0.0)) {
    throw DomainError("step tolerance must be positive");
  }
  const timegrid::TimeGrid& tg = sc.h.tg;
  const ModelParams& pm = sc.h.params;
  const Grid g = pm.make_grid();
  const int p = sc.h.p;
  const int spd = tg.steps_per_decade();
  const int i0 = tg.nearest_node(t0);

  LocalRun run;
  run.t0_node = i0;
  run.t0 = tg.t(i0);
  const AuxState s0{run.t0, sc.V[i0],
                    RealField{g, sc.h.phase_sum(p, i0).values +
                                     sc.chi[i0].values}};
  MarchOutcome up = march(s0, i0, tg, +1, pm, step_tol);
  if (up.blew_up) {
    throw BlowUpError(
        "the forward auxiliary run grew beyond a million times its seed",
        up.t_blow);
  }
  MarchOutcome down;
  if (i0 > 0) {
    down = march(s0, i0, tg, -1, pm, step_tol);
  } else {
    down.states.push_back(s0);
  }
  run.truncated = down.blew_up;
  run.t_trunc = down.t_blow;
  run.traj.first_node = i0 - static_cast<int>(down.states.size()) + 1;
  run.traj.states.assign(std::make_move_iterator(down.states.rbegin()),
                         std::make_move_iterator(down.states.rend()));
  run.traj.states.insert(run.traj.states.end(),
                         std::make_move_iterator(up.states.begin() + 1),
                         std::make_move_iterator(up.states.end()));

  run.rows.reserve(run.traj.states.size());
  for (const AuxState& st : run.traj.states) {
    const int i = tg.nearest_node(st.t);
    EstimateRow r;
    r.t = st.t;
    r.forward = i >= i0;
    const RealField base = sc.h.phase_sum(p, i);
    r.dev_w_V = grid::sobolev_norm(
        ProfileField{g, st.w.values - sc.V[i].values}, pm.k);
    r.dev_w_Wp = grid::sobolev_norm(
        ProfileField{g, st.w.values - sc.h.amplitude_sum(p, i).values}, pm.k);
    r.dev_phi_chi = grid::phase_norm(
        RealField{g, st.phi.values - base.values - sc.chi[i].values}, pm.ell);
    r.dev_phi_psi = grid::phase_norm(
        RealField{g, st.phi.values - base.values - sc.psi_plus.values},
        pm.ell);
    if (r.forward) {
      r.env_w = sc.Qp[i0];
      r.env_phi = sc.Qp[i0] * est::h0_closed(pm.gamma, r.t);
    } else {
      r.env_w = sc.Qp[i];
      r.env_phi = sc.Pp[i];
    }
    r.ratio_w_V = safe_ratio(r.dev_w_V, r.env_w);
    r.ratio_w_Wp = safe_ratio(r.dev_w_Wp, r.env_w);
    r.ratio_phi_chi = safe_ratio(r.dev_phi_chi, r.env_phi);
    r.ratio_phi_psi = safe_ratio(r.dev_phi_psi, r.env_phi);
    r.norm_w = grid::sobolev_norm(st.w, pm.k);
    r.norm_phi_rel = safe_ratio(grid::phase_norm(st.phi, pm.ell),
                                est::h0_closed(pm.gamma, r.t));
    run.rows.push_back(r);
  }

  const int first = run.traj.first_node;
  auto row_at = [&](int node) -> const EstimateRow& {
    return run.rows[static_cast<std::size_t>(node - first)];
  };
  for (int i = i0; i <= run.traj.last_node(); ++i) {
    const EstimateRow& r = row_at(i);
    run.forward.sup_w_V = std::max(run.forward.sup_w_V, r.ratio_w_V);
    run.forward.sup_w_Wp = std::max(run.forward.sup_w_Wp, r.ratio_w_Wp);
    run.forward.sup_phi_chi =
        std::max(run.forward.sup_phi_chi, r.ratio_phi_chi);
    run.forward.sup_phi_psi =
        std::max(run.forward.sup_phi_psi, r.ratio_phi_psi);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  run.drift_w_V = run.drift_w_Wp = run.drift_phi_chi = run.drift_phi_psi =
      nan;
  const int whi = i0 - spd;
  // The drift window is floored one decade above the mesh origin: the first
  // decade sits below the reach of the downward estimates and would skew the
  // comparison point.
  const int wlo = std::max(first, std::min(spd, whi));
  if (whi >= first) {
    std::vector<double> sv, sw, sc_, sp;
    for (int i = first; i <= whi; ++i) {
      const EstimateRow& r = row_at(i);
      run.backward.sup_w_V = std::max(run.backward.sup_w_V, r.ratio_w_V);
      run.backward.sup_w_Wp = std::max(run.backward.sup_w_Wp, r.ratio_w_Wp);
      run.backward.sup_phi_chi =
          std::max(run.backward.sup_phi_chi, r.ratio_phi_chi);
      run.backward.sup_phi_psi =
          std::max(run.backward.sup_phi_psi, r.ratio_phi_psi);
      if (i >= wlo) {
        sv.push_back(r.ratio_w_V);
        sw.push_back(r.ratio_w_Wp);
        sc_.push_back(r.ratio_phi_chi);
        sp.push_back(r.ratio_phi_psi);
      }
    }
    run.drift_w_V = timegrid::drift_factor(sv, spd);
    run.drift_w_Wp = timegrid::drift_factor(sw, spd);
    run.drift_phi_chi = timegrid::drift_factor(sc_, spd);
    run.drift_phi_psi = timegrid::drift_factor(sp, spd);
  }
  {
    // Limit-estimate form: every deviation is compared against the envelope
    // at the running time, on both branches alike.
    std::vector<double> fv, fw, fc, fp;
    for (int i = first; i <= run.traj.last_node(); ++i) {
      const EstimateRow& r = row_at(i);
      fv.push_back(safe_ratio(r.dev_w_V, sc.Qp[i]));
      fw.push_back(safe_ratio(r.dev_w_Wp, sc.Qp[i]));
      fc.push_back(safe_ratio(r.dev_phi_chi, sc.Pp[i]));
      fp.push_back(safe_ratio(r.dev_phi_psi, sc.Pp[i]));
    }
    run.drift_full_w_V = timegrid::drift_factor(fv, spd);
    run.drift_full_w_Wp = timegrid::drift_factor(fw, spd);
    run.drift_full_phi_chi = timegrid::drift_factor(fc, spd);
    run.drift_full_phi_psi = timegrid::drift_factor(fp, spd);
  }
  for (int i = first; i <= run.traj.last_node(); ++i) {
    const EstimateRow& r = row_at(i);
    run.sup_norm_w = std::max(run.sup_norm_w, r.norm_w);
    if (i >= 1) {
      run.sup_norm_phi_rel = std::max(run.sup_norm_phi_rel, r.norm_phi_rel);
    }
  }
  return run;
}

LocalRun local_wave_op(const grid::ProfileField& w_plus,
                       const grid::RealField& psi_plus, int p, double t0,
                       const timegrid::TimeGrid& tg, const ModelParams& params,
                       double step_tol) {
  return local_wave_op(make_scaffold(w_plus, psi_plus, p, tg, params,
                                     step_tol),
                       t0, step_tol);
}

WaveOpResult omega0(const Scaffold& sc, const std::vector<double>& t0_sequence,
                    double step_tol) {
  const timegrid::TimeGrid& tg = sc.h.tg;
  const ModelParams& pm = sc.h.params;
  const Grid g = pm.make_grid();
  const int p = sc.h.p;
  if (t0_sequence.size() < 4) {
    throw DomainError("the seeding sequence needs at least four times");
  }
  std::vector<int> nodes;
  for (double t0 : t0_sequence) {
    if (!(t0 >= 1.0) || t0 > tg.t_end()) {
      throw DomainError("seeding times must lie inside the mesh");
    }
    nodes.push_back(tg.nearest_node(t0));
  }
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    if (nodes[j] <= nodes[j - 1]) {
      throw DomainError(
          "seeding times must be strictly increasing on the mesh");
    }
  }

  std::vector<LocalRun> runs;
  runs.reserve(nodes.size());
  for (int node : nodes) {
    runs.push_back(local_wave_op(sc, tg.t(node), step_tol));
  }
  const int node_fix = nodes.front();
  for (const LocalRun& run : runs) {
    if (!run.traj.covers(node_fix)) {
      throw CauchyError(
          "a local run stopped above the comparison time; enlarge the mesh "
          "or start the sequence later");
    }
  }

  WaveOpResult result;
  result.t_fix = tg.t(node_fix);
  for (int node : nodes) result.t0_used.push_back(tg.t(node));
  for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
    const int node = nodes[j];
    const AuxState& s = runs[j + 1].traj.at_node(node);
    CauchyRow row;
    row.t0 = tg.t(node);
    row.t1 = tg.t(nodes[j + 1]);
    row.diff_w = grid::sobolev_norm(
        ProfileField{g, s.w.values - sc.V[node].values}, pm.k);
    row.env_w = sc.Qp[node];
    row.ratio_w = safe_ratio(row.diff_w, row.env_w);
    row.diff_phi = grid::phase_norm(
        RealField{g, s.phi.values - sc.h.phase_sum(p, node).values -
                         sc.chi[node].values},
        pm.ell);
    row.env_phi = sc.Pp[node];
    row.ratio_phi = safe_ratio(row.diff_phi, row.env_phi);
    result.cauchy.push_back(row);

    FixedTimeRow fixed;
    fixed.t0_prev = tg.t(nodes[j]);
    fixed.t0_next = tg.t(nodes[j + 1]);
    const AuxState& a = runs[j].traj.at_node(node_fix);
    const AuxState& b = runs[j + 1].traj.at_node(node_fix);
    fixed.diff_w = grid::sobolev_norm(
        ProfileField{g, b.w.values - a.w.values}, pm.k);
    result.fixed_time.push_back(fixed);
  }
  for (std::size_t j = 0; j + 1 < result.cauchy.size(); ++j) {
    const double prev = result.cauchy[j].diff_w;
    const double next = result.cauchy[j + 1].diff_w;
    if (next > kCauchySlack * prev && next > kCauchyFloor) {
      throw CauchyError(
          "successive approximants stopped shrinking; raise the horizon or "
          "the resolution");
    }
  }
  for (std::size_t j = 0; j + 1 < result.fixed_time.size(); ++j) {
    const double prev = result.fixed_time[j].diff_w;
    const double next = result.fixed_time[j + 1].diff_w;
    if (next > kCauchySlack * prev && next > kCauchyFloor) {
      throw CauchyError(
          "fixed-time differences stopped shrinking; raise the horizon or "
          "the resolution");
    }
  }
  result.representative = std::move(runs.back());
  return result;
}

WaveOpResult omega0(const grid::ProfileField& w_plus,
                    const grid::RealField& psi_plus, int p,
                    const std::vector<double>& t0_sequence,
                    const timegrid::TimeGrid& tg, const ModelParams& params,
                    double step_tol) {
  return omega0(make_scaffold(w_plus, psi_plus, p, tg, params, step_tol),
                t0_sequence, step_tol);
}

Extraction extract_asymptotics(const AuxTrajectory& traj, int p,
                               const hier::Hierarchy& h) {
  if (traj.states.empty()) {
    throw DomainError("extraction needs a nonempty trajectory");
  }
  if (p < 0 || p > h.p) {
    throw DomainError("extraction depth must lie within the hierarchy");
  }
  const timegrid::TimeGrid& tg = h.tg;
  const ModelParams& pm = h.params;
  const Grid g = pm.make_grid();
  if (!(traj.states.front().w.grid == g)) {
    throw DomainError("trajectory grid must match the hierarchy");
  }
  if (traj.last_node() != tg.steps()) {
    throw DomainError("the trajectory must reach the far end of the mesh");
  }
  const int spd = tg.steps_per_decade();
  const int i_end = tg.steps();
  const int i_mid = i_end - spd;
  const int i_anchor = i_end - 2 * spd;
  if (traj.first_node > i_anchor) {
    throw DomainError(
        "extraction needs the trajectory to cover the last two decades");
  }
  const int psi_order = std::max(0, pm.ell - 1);

  auto remainder = [&](int node) {
    return RealField{g, traj.at_node(node).phi.values -
                            h.phase_sum(p, node).values};
  };
  Extraction out{traj.at_node(i_end).w, remainder(i_end), {}, 0.0, 0.0,
                 std::numeric_limits<double>::quiet_NaN(), false};

  const RealField d_end = out.psi_plus_est;
  const RealField d_mid = remainder(i_mid);
  const RealField d_anchor = remainder(i_anchor);
  // Spatially averaged channel: interaction sources have zero box average,
  // so the average of the remainder moves only through the secular eikonal
  // part, which is exactly the component that never settles when the depth
  // is too shallow for the coupling decay.
  const double move_last = std::abs((d_end.values - d_anchor.values).mean());
  const double move_prev = std::abs((d_mid.values - d_anchor.values).mean());
  out.growth_factor = timegrid::drift_factor({move_prev, move_last}, 1);

  RealField prev = d_mid;
  for (int i = i_mid + 1; i <= i_end; ++i) {
    const RealField cur = remainder(i);
    out.tv_last_decade += grid::phase_norm(
        RealField{g, cur.values - prev.values}, psi_order);
    prev = cur;
  }
  const est::EstContext ctx(pm.gamma);
  if ((p + 2) * pm.gamma > 1.0) {
    out.tv_envelope = est::eval_P(ctx, p, tg.t(i_mid));
  }
  out.nonconvergence =
      out.growth_factor > 2.0 ||
      (std::isfinite(out.tv_envelope) &&
       out.tv_last_decade > 10.0 * out.tv_envelope);

  for (int m = 0; m <= p; ++m) {
    const int order_w = std::max(0, pm.k + p - m - 1);
    const int order_phi = std::max(0, pm.ell + p - m - 1);
    for (int i = traj.first_node; i <= i_end; ++i) {
      const AuxState& st = traj.at_node(i);
      ExtractRateRow row;
      row.m = m;
      row.t = tg.t(i);
      row.dev_w = grid::sobolev_norm(
          ProfileField{g, st.w.values - h.amplitude_sum(m, i).values},
          order_w);
      row.env_w = est::eval_Q(ctx, m, row.t);
      row.ratio_w = safe_ratio(row.dev_w, row.env_w);
      row.dev_phi = grid::phase_norm(
          RealField{g, st.phi.values - h.phase_sum(m, i).values}, order_phi);
      row.env_phi = est::eval_N(ctx, m + 1, row.t);
      row.ratio_phi = safe_ratio(row.dev_phi, row.env_phi);
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace hsl::aux
