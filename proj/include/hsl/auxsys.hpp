#pragma once

#include <vector>

#include "hsl/grid.hpp"
#include "hsl/hierarchy.hpp"
#include "hsl/params.hpp"
#include "hsl/timegrid.hpp"

// Split-step pseudospectral integrator for the coupled amplitude/phase system
//   d/dt w   = i (2 t^2)^{-1} Lap w + (2 t^2)^{-1} (2 grad(phi).grad + Lap(phi)) w
//   d/dt phi = (2 t^2)^{-1} |grad phi|^2 + t^{-gamma} g0(w, w),
// marched on the logarithmic mesh: an exact spectral half step of the free
// flow, a fourth-order explicit step of the transport/eikonal/interaction
// terms, then the second exact half step (Strang, second order overall).  On
// top of the integrator sit the wave-operator runs: local runs seeded from
// the backward-transported limit profiles at a matching time t0, the
// tightening family of such runs over an increasing t0 sequence, and the
// extraction of the limiting amplitude/phase data from a trajectory.
namespace hsl::aux {

struct AuxState {
  double t;
  grid::ProfileField w;
  grid::RealField phi;
};

enum class Direction { Forward, Backward };

// Consecutive mesh nodes in ascending time order; states.front() sits at
// mesh index first_node.
struct AuxTrajectory {
  int first_node = 0;
  std::vector<AuxState> states;

  int last_node() const;
  bool covers(int node) const;
  const AuxState& at_node(int node) const;  // throws DomainError if uncovered
};

// Marches state0 (whose time must sit on a node of tg) to the end of the
// mesh in the given direction.  Throws StepRejectedError when the embedded
// local error estimate exceeds step_tol * (1 + field norm) and BlowUpError
// when the amplitude L2 norm or the phase sup norm exceeds a million times
// the initial state's combined size.
AuxTrajectory integrate(const AuxState& state0, const timegrid::TimeGrid& tg,
                        Direction direction, const ModelParams& params,
                        double step_tol = 1e-3);

// Largest relative deviation of the amplitude L2 norm from its value at the
// first covered node (absolute when that value is zero); the coupled flow
// conserves it.
double mass_drift(const AuxTrajectory& traj);

// Shared scaffolding for the wave-operator runs over one data pair
// (w_plus, psi_plus): the correction hierarchy through order p, the driving
// phase (partial phase sum of order p-1), the backward-transported limit
// profiles V and chi, and the per-node decay envelopes Q_p and P_p.
struct Scaffold {
  hier::Hierarchy h;
  std::vector<grid::RealField> phase;
  std::vector<grid::ProfileField> V;
  std::vector<grid::RealField> chi;
  grid::RealField psi_plus;
  std::vector<double> Qp;
  std::vector<double> Pp;
};

// Requires (p + 2) * gamma > 1 (the phase remainder must have an integrable
// tail) and band-limited data.
Scaffold make_scaffold(const grid::ProfileField& w_plus,
                       const grid::RealField& psi_plus, int p,
                       const timegrid::TimeGrid& tg, const ModelParams& params,
                       double step_tol = 1e-3);

// Per-node comparison of a local run against the limit profiles: amplitude
// deviations vs V and vs the amplitude partial sum W_p in H^k, phase
// deviations vs Phi_p + chi and vs Phi_p + psi_plus in the phase norm of
// order ell.  Nodes at or above the seeding time use the constant envelopes
// Q_p(t0) resp. Q_p(t0) * h0(t); nodes below use Q_p(t) resp. P_p(t).
struct EstimateRow {
  double t = 0;
  bool forward = false;
  double dev_w_V = 0;
  double dev_w_Wp = 0;
  double dev_phi_chi = 0;
  double dev_phi_psi = 0;
  double env_w = 0;
  double env_phi = 0;
  double ratio_w_V = 0;
  double ratio_w_Wp = 0;
  double ratio_phi_chi = 0;
  double ratio_phi_psi = 0;
  double norm_w = 0;        // |w|_k, uniform-boundedness row
  double norm_phi_rel = 0;  // |phi|_ell / h0(t)
};

struct RatioStats {
  double sup_w_V = 0;
  double sup_w_Wp = 0;
  double sup_phi_chi = 0;
  double sup_phi_psi = 0;
};

struct LocalRun {
  AuxTrajectory traj;
  int t0_node = 0;
  double t0 = 0;          // snapped seeding time
  bool truncated = false; // downward sweep stopped by the blow-up guard
  double t_trunc = 0;     // time at which it stopped (0 when not truncated)
  std::vector<EstimateRow> rows;  // one per covered node
  RatioStats forward;   // over nodes at or above t0
  RatioStats backward;  // over nodes at least one decade below t0
  // Drift of the backward-branch ratios: value one decade below t0 against
  // one decade earlier still.
  double drift_w_V = 0;
  double drift_w_Wp = 0;
  double drift_phi_chi = 0;
  double drift_phi_psi = 0;
  // Drift of each ratio over the last covered decade of the whole run
  // (terminal value against one decade earlier).
  double drift_full_w_V = 0;
  double drift_full_w_Wp = 0;
  double drift_full_phi_chi = 0;
  double drift_full_phi_psi = 0;
  double sup_norm_w = 0;
  double sup_norm_phi_rel = 0;  // over nodes past the first (h0(1) = 0)
};

// Seeds the auxiliary system at t0 with w = V(t0), phi = Phi_p(t0) + chi(t0),
// marches up to the end of the mesh and down as far as the blow-up guard
// allows (the adaptive lower existence limit), and tabulates the deviation
// ratios.  t0 must sit on the mesh.
LocalRun local_wave_op(const Scaffold& sc, double t0, double step_tol = 1e-3);
LocalRun local_wave_op(const grid::ProfileField& w_plus,
                       const grid::RealField& psi_plus, int p, double t0,
                       const timegrid::TimeGrid& tg, const ModelParams& params,
                       double step_tol = 1e-3);

// Difference between the runs seeded at consecutive pair (t0, t1), measured
// at t0 where the earlier run equals V exactly: diff_w = |w_{t1}(t0)-V(t0)|_k
// over Q_p(t0) and diff_phi = |phi_{t1}(t0)-Phi_p(t0)-chi(t0)|_ell over
// P_p(t0).
struct CauchyRow {
  double t0 = 0;
  double t1 = 0;
  double diff_w = 0;
  double env_w = 0;
  double ratio_w = 0;
  double diff_phi = 0;
  double env_phi = 0;
  double ratio_phi = 0;
};

// |w_{t0_next}(t_fix) - w_{t0_prev}(t_fix)|_k at the fixed comparison time
// t_fix (the first seeding time); these must shrink as the seeds advance.
struct FixedTimeRow {
  double t0_prev = 0;
  double t0_next = 0;
  double diff_w = 0;
};

struct WaveOpResult {
  std::vector<double> t0_used;  // snapped seeding times
  LocalRun representative;      // the run seeded latest
  std::vector<CauchyRow> cauchy;
  double t_fix = 0;
  std::vector<FixedTimeRow> fixed_time;
};

// Runs local_wave_op over an increasing sequence of at least four seeding
// times and verifies that the successive differences tighten: each cauchy
// and fixed-time difference may exceed its predecessor by at most x1.5
// (CauchyError otherwise, signalling that the horizon or resolution is too
// small).  Every run must reach the first seeding time on its way down.
WaveOpResult omega0(const Scaffold& sc, const std::vector<double>& t0_sequence,
                    double step_tol = 1e-3);
WaveOpResult omega0(const grid::ProfileField& w_plus,
                    const grid::RealField& psi_plus, int p,
                    const std::vector<double>& t0_sequence,
                    const timegrid::TimeGrid& tg, const ModelParams& params,
                    double step_tol = 1e-3);

// Deviation of the trajectory from the partial sums of order m: amplitude in
// H^{k+p-m-1} against Q_m(t), phase in the order-(ell+p-m-1) phase norm
// against N_{m+1}(t).
struct ExtractRateRow {
  int m = 0;
  double t = 0;
  double dev_w = 0;
  double env_w = 0;
  double ratio_w = 0;
  double dev_phi = 0;
  double env_phi = 0;
  double ratio_phi = 0;
};

struct Extraction {
  grid::ProfileField w_plus_est;   // amplitude at the far end of the mesh
  grid::RealField psi_plus_est;    // (phi - Phi_p) there
  std::vector<ExtractRateRow> rows;  // m = 0..p, covered nodes, m-major
  // Movement of the spatial average of phi - Phi_p relative to the anchor two
  // decades below the far end: size of the last decade's movement over the
  // previous decade's.  The averaged channel isolates the secular part of the
  // remainder (interaction sources average to zero over the box, so only the
  // eikonal pumping moves the average); a settling remainder keeps the ratio
  // well below two while a power-law ramp pushes it above.
  double growth_factor = 0;
  // Total variation of phi - Phi_p over the last decade and the P_p value
  // predicting it (NaN when (p+2) gamma <= 1 leaves the tail divergent).
  double tv_last_decade = 0;
  double tv_envelope = 0;
  bool nonconvergence = false;
};

// Reads the limiting data off a trajectory that reaches the end of the mesh
// and covers at least its last two decades.  The hierarchy must hold levels
// 0..p on the same mesh.  The nonconvergence flag raises when the phase
// remainder's movement grows past x2 decade over decade, or when its
// last-decade total variation exceeds ten times the P_p prediction.
Extraction extract_asymptotics(const AuxTrajectory& traj, int p,
                               const hier::Hierarchy& h);

}  // namespace hsl::aux
