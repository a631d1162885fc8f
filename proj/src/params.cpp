#include "hsl/params.hpp"

#include <cmath>

namespace hsl {

void ModelParams::validate() const {
  if (n < 1) throw DomainError("dimension must be positive");
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw DomainError("time-decay exponent gamma must lie in (0, 1]");
  }
  if (!std::isfinite(lambda)) throw DomainError("coupling must be finite");
  if (!(box_length > 0.0)) throw DomainError("box length must be positive");
  if (samples < 2 || samples % 2 != 0) {
    throw DomainError("samples per axis must be even and at least 2");
  }
  if (k < 0 || ell < 0) {
    throw DomainError("regularity indices must be nonnegative");
  }
  if (relaxed) {
    if (!(mu > 0.0) || !(mu < n)) {
      throw DomainError("interaction exponent must lie in (0, n)");
    }
    return;
  }
  if (n < 3) {
    throw DomainError("dimension below 3 requires the relaxed flag");
  }
  if (!(mu > 0.0) || mu > n - 2 + 1e-9) {
    throw DomainError("interaction exponent must lie in (0, n-2]");
  }
  if (!grid::admissible(k, ell, n, mu)) {
    throw DomainError("regularity pair (k, ell) is not admissible");
  }
}

grid::Grid ModelParams::make_grid() const {
  return grid::Grid(n, samples, box_length);
}

}  // namespace hsl
