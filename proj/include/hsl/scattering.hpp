#pragma once

#include <vector>

#include "hsl/auxsys.hpp"
#include "hsl/grid.hpp"
#include "hsl/hierarchy.hpp"
#include "hsl/params.hpp"
#include "hsl/timegrid.hpp"

// Physical-space layer on top of the amplitude/phase pipeline: solutions
// reconstructed on the moving grid x = t*y, an independent single-field
// solver for the gauge-invariant profile equation, gauge-equivalence
// utilities, the asymptotic error report against the limit data, and the
// extraction of the constant phase offset between gauge-equivalent runs.
namespace hsl::scatter {

// Distance below which two amplitude/phase pairs count as the same solution.
inline constexpr double kGaugeTol = 1e-6;

// Solution samples on the moving grid: sample j sits at x_j = t * y_j, where
// y_j runs over the centered fundamental cell [-L/2, L/2)^n of the profile
// grid in the grid's own flattening order.
struct PhysicalSample {
  double t = 1.0;
  Eigen::MatrixXd points;   // one row per sample, one column per axis
  Eigen::ArrayXcd values;   // u(t, x_j)
  double cell = 0.0;        // volume of one moving-grid cell, (t L / N)^n
};

// L^r norm of the samples weighted by the moving-grid cell volume (plain sup
// for infinite r), matching the continuum norm of the reconstruction.
double moving_lr_norm(const PhysicalSample& s, double r);

// Reconstructs u(t, t*y) = (it)^{-n/2} exp(i t y^2/2) exp(-i phi(y)) w(y)
// exactly at the moving grid points, with no interpolation.  The modulus is
// t^{-n/2} |w| pointwise, so the moving-grid L2 norm equals |w|_2 for every
// t and every phase.  Requires t >= 1.
PhysicalSample lambda_map(const grid::ProfileField& w,
                          const grid::RealField& phi, double t);

// L2 distance between the solutions two amplitude/phase pairs reconstruct,
// evaluated on the profile grid where the moving-grid Jacobian cancels:
// |w exp(-i phi) - w2 exp(-i phi2)|_2.  Vanishes exactly when the pairs
// differ by the gauge shift (w, phi) -> (w e^{i sigma}, phi + sigma).
double gauge_equiv(const grid::ProfileField& w, const grid::RealField& phi,
                   const grid::ProfileField& w2, const grid::RealField& phi2);
bool gauge_equivalent(const grid::ProfileField& w, const grid::RealField& phi,
                      const grid::ProfileField& w2, const grid::RealField& phi2,
                      double tol = kGaugeTol);

// Forward trajectory of the single-field profile solver over consecutive
// mesh nodes; psi.front() sits at mesh index first_node.
struct DirectRun {
  int first_node = 0;
  std::vector<double> times;
  std::vector<grid::ProfileField> psi;
  double mass_drift = 0.0;  // largest relative L2 movement across the run

  int last_node() const;
  bool covers(int node) const;
  const grid::ProfileField& at_node(int node) const;  // DomainError if missing
};

// Marches d/dt psi = i (2 t^2)^{-1} Lap psi - i t^{-gamma} g0(psi, psi) psi
// from t0 (a mesh node) to the end of the mesh by Strang splitting with both
// substeps exact: the free flow acts spectrally, and the interaction term
// rotates the phase pointwise through the exact time integral of t^{-gamma}
// (its potential depends only on |psi|, which the rotation preserves).  Both
// substeps are unitary, so the L2 norm is conserved to round-off.  The seed
// is taken as given: pointwise products such as w exp(-i phi) are legitimate
// seeds, and well-resolved runs are the caller's regime of interest.  A
// halved-step companion guards every step; its gap past
// step_tol * (1 + field norm) raises StepRejectedError.
DirectRun direct_profile_solve(const grid::ProfileField& psi0, double t0,
                               const timegrid::TimeGrid& tg,
                               const ModelParams& params,
                               double step_tol = 1e-3);

// The wave-operator pipeline over an asymptotic amplitude with zero
// asymptotic phase, bundled with its scaffolding so that reports and
// reconstructions can reuse the envelopes and limit profiles.
struct OmegaOutput {
  aux::Scaffold scaffold;
  aux::WaveOpResult result;
};

OmegaOutput omega(const grid::ProfileField& w_plus, int p,
                  const std::vector<double>& t0_sequence,
                  const timegrid::TimeGrid& tg, const ModelParams& params,
                  double step_tol = 1e-3);

// Solution-level L2 separation of two trajectories at the earliest node both
// cover; data pairs a fixed distance apart must keep this above half that
// distance, which is the quantitative distinguishability check.
double initial_separation(const aux::AuxTrajectory& a,
                          const aux::AuxTrajectory& b);

// Deviation of a trajectory from its asymptotic target at one node.  The
// weighted L^r columns report t^{delta(r)} times the moving-grid L^r norm of
// u(t) - (free reconstruction of the limit amplitude through the order-p
// phase sum); the weight cancels the moving-grid Jacobian exactly, so the
// column is evaluated in its reduced profile form
// |exp(i (Phi_p - phi)) w - w_plus|_{L^r}, and the r = 2 column reproduces
// the L2 row E0 identically.
struct ErrorRow {
  double t = 0.0;
  double Ek = 0.0;     // |exp(i (Phi_p - phi)) w - w_plus|_k
  double E0 = 0.0;     // the same difference in L2
  double Pp = 0.0;     // phase envelope at t
  double ratio = 0.0;  // Ek / Pp
  std::vector<double> lr;        // weighted L^r deviations, one per r
  std::vector<double> lr_ratio;  // the same over Pp
};

struct ErrorReport {
  std::vector<double> r_list;
  std::vector<double> delta;   // decay exponent n/2 - n/r per entry
  std::vector<ErrorRow> rows;  // one per covered node
  double drift = 0.0;          // Ek/Pp at the far end over one decade earlier
};

// Tabulates the deviation rows over every node the trajectory covers.  Each
// r must keep delta(r) = n/2 - n/r inside [0, min(k, n/2)], strictly below
// the top when k equals n/2; r outside that window raises DomainError.  The
// hierarchy must hold levels 0..p of the same data on the same mesh.
ErrorReport asymptotic_error_report(const aux::AuxTrajectory& traj,
                                    const hier::Hierarchy& h,
                                    const std::vector<double>& r_list);

// Constant phase offset between two gauge-equivalent trajectories.
struct SigmaResult {
  grid::RealField sigma;   // phase difference read off at the far end
  double residual = 0.0;   // sup over the last decade of
                           // |offset(t) - sigma|_{ell-2} / h(t)
  double mismatch = 0.0;   // |w2(end) - w(end) e^{i sigma}|_2
};

// Reads sigma = (phi2 - phi)(t_end) off the far end of the common coverage,
// measures how fast the offset settles against the decay envelope h, and
// checks that the far-end amplitudes differ by exactly the rotation
// e^{+i sigma}.  Requires the runs to be gauge equivalent (solution-level
// distance at most 1e-5 at every common node) on matching grids with at
// least two common nodes.
SigmaResult sigma_extract(const aux::AuxTrajectory& a,
                          const aux::AuxTrajectory& b,
                          const ModelParams& params);

}  // namespace hsl::scatter
