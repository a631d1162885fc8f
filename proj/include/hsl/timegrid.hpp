#pragma once

#include <cstddef>
#include <vector>

#include "hsl/errors.hpp"

// Uniform mesh in tau = log t starting at t = 1, with an integer number of
// steps per decade.  The step is exactly ln(10)/steps_per_decade, every
// decade 10^d lands on a node, and a requested end time is rounded up to the
// node lattice, so meshes with the same steps_per_decade nest.
namespace hsl::timegrid {

class TimeGrid {
public:
  TimeGrid(double t_end, int steps_per_decade);

  int steps_per_decade() const { return spd_; }
  int steps() const { return steps_; }          // intervals
  int nodes() const { return steps_ + 1; }
  double dtau() const;                          // ln(10) / steps_per_decade
  double tau(int i) const;                      // i * dtau
  double t(int i) const;                        // 10^(i / steps_per_decade)
  double t_end() const { return t(steps_); }
  int nearest_node(double t_query) const;       // clamped to [0, steps]

private:
  int spd_;
  int steps_;
};

// Cumulative integral of uniformly sampled values with step h: composite
// Simpson over node pairs, with the interior odd-node increments filled by
// the closed three-point rule (both O(h^4)).  result[i] approximates the
// integral from node 0 to node i; result[0] = 0.  Works for any value type
// with linear arithmetic (double, Eigen arrays).
template <typename V>
std::vector<V> cumulative_samples(const std::vector<V>& f, double h) {
  if (!(h > 0.0)) {
    throw DomainError("cumulative integration requires a positive step");
  }
  const std::size_t n = f.size();
  std::vector<V> out;
  if (n == 0) return out;
  const V zero(0.0 * f[0]);
  out.assign(n, zero);
  if (n == 1) return out;
  if (n == 2) {
    out[1] = V(h * (f[0] + f[1]) / 2.0);
    return out;
  }
  // Even nodes: composite Simpson pairs.
  for (std::size_t i = 2; i < n; i += 2) {
    out[i] = V(out[i - 2] + h * (f[i - 2] + 4.0 * f[i - 1] + f[i]) / 3.0);
  }
  // Odd nodes: one quadratic sub-interval, using the node ahead when it
  // exists and the node behind at the end of the mesh.
  for (std::size_t i = 1; i < n; i += 2) {
    if (i + 1 < n) {
      out[i] =
          V(out[i - 1] + h * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]) / 12.0);
    } else {
      out[i] =
          V(out[i - 1] + h * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]) / 12.0);
    }
  }
  return out;
}

std::vector<double> cumulative_integral(const std::vector<double>& f,
                                        double h);

// Least-squares slope of log(values[i]) against i*h.  All values must be
// positive; otherwise the decay fit is meaningless and TailFitError is
// thrown.  Needs at least two samples.
double fit_log_slope(const std::vector<double>& values, double h);

// Ratio of the last sample to the sample one decade earlier (clamped to the
// first sample on short series).  Both zero counts as no drift (1); only the
// earlier one zero counts as infinite drift.
double drift_factor(const std::vector<double>& series, int steps_per_decade);

}  // namespace hsl::timegrid
