#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hsl/errors.hpp"

// Periodic uniform grid on the torus [0, L)^n with spectral (trigonometric)
// calculus.  Complex profile fields and real phase fields are stored flattened
// row-major (axis 0 slowest); spectral coefficients c satisfy
//   f(x) = sum_xi c_xi exp(+i 2 pi xi . x / L),
// i.e. c = DFT(f) / N^n, so the continuum L^2 norm of a band-limited field is
// L^(n/2) * ||c||_2 exactly.
namespace hsl::grid {

struct Grid {
  int dim;        // spatial dimension n
  int samples;    // per-axis sample count N (even)
  double length;  // box edge length L

  Grid(int dim_, int samples_, double length_);

  std::int64_t size() const;            // N^n
  int fold(int mode) const;             // signed mode -> storage index
  int signed_mode(int index) const;     // storage index -> mode in [-N/2, N/2)
  double wavenumber(int index) const;   // 2 pi signed_mode / L
  double cell_volume() const;           // (L/N)^n
  int dealias_cutoff() const;           // floor(N/3)

  bool operator==(const Grid&) const = default;
};

// Complex field sampled in physical space.
struct ProfileField {
  Grid grid;
  Eigen::ArrayXcd values;
};

// Real field sampled in physical space (phases, interaction potentials).
struct RealField {
  Grid grid;
  Eigen::ArrayXd values;
};

// Spectral coefficients c (same flattened layout, mode index folded).
struct SpectralField {
  Grid grid;
  Eigen::ArrayXcd coeffs;
};

ProfileField zero_profile(const Grid& g);
RealField zero_real(const Grid& g);
SpectralField zero_spectral(const Grid& g);

ProfileField complexify(const RealField& f);
RealField real_part(const ProfileField& f);

// Transforms (exact inverses of each other up to rounding).
SpectralField to_spectral(const ProfileField& f);
ProfileField to_physical(const SpectralField& c);

// Spectral derivative along one axis, d/dx_axis.
SpectralField derivative(const SpectralField& c, int axis);
ProfileField partial(const ProfileField& f, int axis);
RealField partial(const RealField& f, int axis);
ProfileField laplacian_of(const ProfileField& f);
RealField laplacian_of(const RealField& f);

// Zeroes every mode with any |signed mode| exceeding floor(N/3) (keeps
// quadratic products alias-free).
SpectralField dealiased(const SpectralField& c);

// Physical-space round trip through dealiased(): projects a sampled field
// onto the alias-safe band.
ProfileField band_limit(const ProfileField& f);
RealField band_limit(const RealField& f);

// Throws DomainError (mentioning `what`) when the field carries relative
// spectral content above 1e-12 outside the dealiasing cutoff.
void require_band_limited(const ProfileField& f, const char* what);
void require_band_limited(const RealField& f, const char* what);

// (2 grad(phi) . grad + laplacian(phi)) f, projected onto the safe band.
ProfileField transport_apply(const RealField& phi, const ProfileField& f);

// grad(a) . grad(b), projected onto the safe band.
RealField gradient_dot(const RealField& a, const RealField& b);

// |k|^2 for every spectral storage slot (the symbol of -Laplacian).
Eigen::ArrayXd squared_wavenumbers(const Grid& g);

// Exact free flow exp(i c Laplacian) applied spectrally (unit-modulus phase
// factors exp(-i c |k|^2) on the coefficients; unitary for any real c).
ProfileField laplacian_flow(const ProfileField& f, double c);

// Homogeneous Fourier multiplier |k|^exponent with the zero mode removed.
// Only negative exponents (smoothing multipliers) are meaningful here.
SpectralField riesz(const SpectralField& c, double exponent);

// Interaction potential lambda * |k|^(mu-n)-multiplier applied to the
// dealiased product Re(w1 conj(w2)), returned with exactly zero grid mean.
RealField interaction_potential(const ProfileField& w1, const ProfileField& w2,
                                double lambda, double mu);

// Norms.  l2/lp are grid-weighted ((L/N)^(n/2) resp. (L/N)^(n/p) factors), so
// they agree with the continuum norms of band-limited fields.
double l2_norm(const ProfileField& f);
double l2_norm(const RealField& f);
double lp_norm(const ProfileField& f, double p);  // p in [1, inf]
double lp_norm(const RealField& f, double p);
double sup_norm(const ProfileField& f);
double sup_norm(const RealField& f);

// Sum of ||d^alpha f||_2 over all multi-indices alpha with |alpha| = order.
double derivative_layer_norm(const SpectralField& c, int order);
// Sobolev-type norm: sum of derivative_layer_norm over orders 0..k.
double sobolev_norm(const ProfileField& f, int k);
double sobolev_norm(const RealField& f, int k);
// Phase-space norm: sup norm, first derivatives in L^r0 (r0 = 2n for odd n,
// sup for even n), plus the L^2 derivative layers of orders floor(n/2)+1 and
// ell+2.
double phase_norm(const RealField& f, int ell);

// All multi-indices alpha in N^dim with |alpha| = order, lexicographic.
std::vector<std::vector<int>> multi_indices(int dim, int order);

// Whether the regularity pair (k, ell) is admissible for dimension n and
// interaction exponent mu (0 < mu <= n-2): k <= ell, ell > n/2,
// ell + 2 + mu <= min(n/2 + 2k, n + k) with k > n/2 when equality holds
// against n + k, and for even n additionally
// n/2 + 3 + mu < min(n/2 + 2k, n + k).  Comparisons carry a 1e-9 slack.
bool admissible(int k, int ell, int n, double mu);

// Band-limited complex Gaussian field: independent draws on the modes with
// |signed mode|_inf <= radius in a fixed lexicographic order (so the field is
// independent of the grid resolution), weighted by exp(-|mode|^2/radius^2).
ProfileField random_band_limited(const Grid& g, int radius,
                                 std::uint64_t seed);

// Snapshot serialization: magic "HSL1", little-endian int64 dim and samples,
// f64 length, then size() (re, im) f64 pairs in storage order.
void save_profile(const std::string& path, const ProfileField& f);
ProfileField load_profile(const std::string& path);

}  // namespace hsl::grid
