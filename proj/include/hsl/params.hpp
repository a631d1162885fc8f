#pragma once

#include "hsl/errors.hpp"
#include "hsl/grid.hpp"

namespace hsl {

// Physical and discretization parameters of the long-range interaction model:
// the coupling decays like t^{-gamma} in time and the interaction kernel is
// the |k|^{mu-n} multiplier on an n-torus of edge box_length discretized with
// samples points per axis.  (k, ell) is the regularity pair used by the norm
// reports.
struct ModelParams {
  int n = 3;
  double mu = 1.0;
  double gamma = 0.6;
  double lambda = 1.0;
  double box_length = 4.0 * 3.141592653589793;
  int samples = 16;
  int k = 2;
  int ell = 2;
  // Skips the dimension and admissibility restrictions so tiny smoke setups
  // (n < 3, inadmissible pairs) can run; production paths leave this false.
  bool relaxed = false;

  void validate() const;
  grid::Grid make_grid() const;
};

}  // namespace hsl
