#pragma once

// Backward transport of data prescribed at the far end of the time mesh.
// The amplitude V rides the first-order operator generated by a precomputed
// phase trajectory; the phase remainder chi rides its pure advection part.
// Comparison tables measure how fast V settles onto the asymptotic
// amplitude sums, and a gauge check verifies that only the combination
// V e^{-i chi} matters, not how the data splits into amplitude and phase.

#include <vector>

#include "hsl/errors.hpp"
#include "hsl/grid.hpp"
#include "hsl/hierarchy.hpp"
#include "hsl/timegrid.hpp"

namespace hsl::transport {

// Integrates d/dt V = (2t^2)^{-1} (2 grad(phi).grad + lap(phi)) V backward
// in log-time from the last mesh node, where V equals `w_plus` bitwise.
// `phi` supplies the driving phase at every node; half-step values come from
// a cubic through the four nearest nodes.  Steps are classical fourth order;
// a step whose embedded second-order companion deviates by more than
// `step_tol` relative to (1 + |V|_2) raises StepRejectedError.
std::vector<grid::ProfileField> solve_V(const grid::ProfileField& w_plus,
                                        const std::vector<grid::RealField>& phi,
                                        const timegrid::TimeGrid& tg,
                                        double step_tol = 1e-3);

// Same backward march for the phase remainder:
// d/dt chi = t^{-2} grad(phi).grad(chi), with chi = `psi_plus` at the last
// node.  Constants are transported unchanged.
std::vector<grid::RealField> solve_chi(const grid::RealField& psi_plus,
                                       const std::vector<grid::RealField>& phi,
                                       const timegrid::TimeGrid& tg,
                                       double step_tol = 1e-3);

// One mesh node of the settling table: distance of V from the bare data
// (order k-1, against the envelope h) and from the asymptotic amplitude sum
// W_p (order k, against the envelope Q_p).
struct TransportRow {
  double t;
  double norm_dev_seed;  // |V - w_plus|_{k-1}
  double env_seed;       // h(t)
  double ratio_seed;
  double norm_dev_sum;  // |V - W_p|_k
  double env_sum;       // Q_p(t)
  double ratio_sum;
};

// Summary statistics are taken over nodes at least one decade below the far
// end, where the imposed terminal data no longer pins the deviation to zero.
struct TransportReport {
  std::vector<TransportRow> rows;  // one per mesh node
  double sup_ratio_seed;
  double drift_seed;
  double sup_ratio_sum;
  double drift_sum;
};

// Settling rates of the transported amplitude against the hierarchy's
// envelopes; `k` is the derivative order for the W_p comparison.
TransportReport compare_with_hierarchy(const std::vector<grid::ProfileField>& V,
                                       const hier::Hierarchy& h, int k);

// One mesh node of the phase-remainder settling table: |chi - psi_plus| at
// order ell-1 against the envelope h.
struct ChiRow {
  double t;
  double norm_dev;
  double env;
  double ratio;
};

std::vector<ChiRow> chi_deviation(const std::vector<grid::RealField>& chi,
                                  const grid::RealField& psi_plus,
                                  double gamma, int ell,
                                  const timegrid::TimeGrid& tg);

// Largest relative change of |V|_2 across the trajectory, measured against
// the far-end data.  The generator is skew-adjoint up to commutators with
// the band projection, so this stays near rounding level on healthy runs.
double l2_drift(const std::vector<grid::ProfileField>& V);

// Runs (V, chi) from (w_plus, psi_plus) and (V', chi') from the equivalent
// zero-phase data (w_plus e^{-i psi_plus}, 0), then returns the largest L2
// distance over the mesh between V e^{-i chi} and V' e^{-i chi'}.
double gauge_check_transport(const grid::ProfileField& w_plus,
                             const grid::RealField& psi_plus,
                             const std::vector<grid::RealField>& phi,
                             const timegrid::TimeGrid& tg,
                             double step_tol = 1e-3);

// Sensitivity to where the far-end data is imposed: repeats the march from
// roughly half the horizon and reports the largest L2 gap on the shared
// nodes together with the shorter horizon used.  The gap estimates the error
// of treating the mesh end as infinity and should be comparable to h(t_end).
struct InfinityGap {
  double gap;
  double t_end_short;
};

InfinityGap richardson_infinity_gap(const grid::ProfileField& w_plus,
                                    const std::vector<grid::RealField>& phi,
                                    const timegrid::TimeGrid& tg,
                                    double step_tol = 1e-3);

}  // namespace hsl::transport
