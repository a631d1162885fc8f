#pragma once

#include <vector>

#include "hsl/grid.hpp"
#include "hsl/params.hpp"
#include "hsl/timegrid.hpp"

// Successive-integration solution of the asymptotic amplitude/phase system:
// each amplitude correction w_{m+1} is obtained by integrating its transport
// source from t to infinity (quadrature to the end of the mesh plus a fitted
// power-law tail), and each phase correction phi_{m+1} by cumulative
// quadrature of its eikonal and interaction sources from t = 1.
namespace hsl::hier {

struct Hierarchy {
  ModelParams params;
  timegrid::TimeGrid tg;
  int p = 0;
  // w[m][i]: amplitude correction of order m at node i, m = 0..p+1; w[0] is
  // the constant seed trajectory.
  std::vector<std::vector<grid::ProfileField>> w;
  // phi[m][i]: phase correction of order m at node i, m = 0..p.
  std::vector<std::vector<grid::RealField>> phi;
  // Next phase correction integrated from infinity; empty until
  // solve_psi_tail has run (requires (p+2)*gamma > 1).
  std::vector<grid::RealField> psi_tail;

  grid::ProfileField amplitude_sum(int m, int node) const;  // sum w_0..w_m
  // Sum phi_0..phi_m; m = -1 yields the empty sum (zero field).
  grid::RealField phase_sum(int m, int node) const;
};

// Solves levels 0..p (plus the extra amplitude correction w_{p+1}).  The seed
// must live on the grid described by params and be band-limited to the
// dealiasing cutoff; the requested depth must leave k+p+1 resolvable
// derivatives inside that cutoff.
Hierarchy solve_hierarchy(const grid::ProfileField& w_plus, int p,
                          const timegrid::TimeGrid& tg,
                          const ModelParams& params);

// Fills h.psi_tail with the order-(p+1) phase correction vanishing at
// infinity.  Throws DomainError unless (p+2)*gamma > 1.  Idempotent.
void solve_psi_tail(Hierarchy& h);

struct DecayRow {
  int m;
  double t;
  double norm_w;    // |w_{m+1}(t)| at order min(k, k+p-m-1)
  double env_w;     // Q_m(t)
  double ratio_w;
  double norm_phi;  // |phi_m(t)| at order ell
  double env_phi;   // N_m(t)
  double ratio_phi;
};

struct PsiRow {
  double t;
  double norm;  // |psi_tail(t)| at order ell-1
  double env;   // P_p(t)
  double ratio;
};

struct LevelSummary {
  int m;
  double sup_ratio_w;
  double drift_w;
  double sup_ratio_phi;
  double drift_phi;
};

struct DecayReport {
  std::vector<DecayRow> rows;    // grouped by m = 0..p, node-major inside
  std::vector<PsiRow> psi_rows;  // empty when psi_tail is not solved
  std::vector<LevelSummary> summary;
  double sup_ratio_psi;  // NaN when psi_rows is empty
  double drift_psi;
};

// Trajectories of the norm/envelope ratios certifying the decay orders; the
// drift factors compare each ratio at the last node against one decade
// earlier.
DecayReport hierarchy_decay_report(const Hierarchy& h, int k, int ell);

// Solves the hierarchy from w_plus and from w_plus * exp(i sigma) and returns
// the largest relative deviation |phi_m - phi'_m|_{ell-1} / (1 + |phi_m|_{ell-1})
// over all phase levels (including the tail level when (p+2)*gamma > 1) and
// nodes.  The phases are invariant under this twist in exact arithmetic.
double hierarchy_gauge_check(const grid::ProfileField& w_plus,
                             const grid::RealField& sigma, int p,
                             const timegrid::TimeGrid& tg,
                             const ModelParams& params);

}  // namespace hsl::hier
