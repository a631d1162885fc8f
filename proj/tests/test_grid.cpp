#include "hsl/grid.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "hsl/errors.hpp"

using namespace hsl::grid;
using std::complex;

namespace {

constexpr double kPi = 3.14159265358979323846;

double coord(const Grid& g, std::int64_t idx, int axis) {
  std::int64_t stride = 1;
  for (int a = g.dim - 1; a > axis; --a) stride *= g.samples;
  const int i = static_cast<int>((idx / stride) % g.samples);
  return g.length / g.samples * i;
}

ProfileField plane_wave(const Grid& g, const std::vector<int>& mode,
                        complex<double> amp) {
  ProfileField f = zero_profile(g);
  for (std::int64_t idx = 0; idx < f.values.size(); ++idx) {
    double phase = 0.0;
    for (int axis = 0; axis < g.dim; ++axis)
      phase += 2.0 * kPi * mode[axis] * coord(g, idx, axis) / g.length;
    f.values[idx] = amp * std::exp(complex<double>(0.0, phase));
  }
  return f;
}

std::int64_t mode_slot(const Grid& g, const std::vector<int>& mode) {
  std::int64_t idx = 0;
  for (int axis = 0; axis < g.dim; ++axis) {
    std::int64_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= g.samples;
    idx += static_cast<std::int64_t>(g.fold(mode[axis])) * stride;
  }
  return idx;
}

}  // namespace

TEST_CASE("grid construction and mode bookkeeping") {
  CHECK_THROWS_AS(Grid(0, 16, 1.0), hsl::DomainError);
  CHECK_THROWS_AS(Grid(5, 16, 1.0), hsl::DomainError);
  CHECK_THROWS_AS(Grid(3, 15, 1.0), hsl::DomainError);
  CHECK_THROWS_AS(Grid(3, 16, 0.0), hsl::DomainError);
  CHECK_THROWS_AS(Grid(3, 16, -2.0), hsl::DomainError);

  Grid g(3, 16, 8.0);
  CHECK(g.size() == 4096);
  CHECK(g.dealias_cutoff() == 5);
  CHECK(g.cell_volume() == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(g.signed_mode(0) == 0);
  CHECK(g.signed_mode(7) == 7);
  CHECK(g.signed_mode(8) == -8);
  CHECK(g.signed_mode(15) == -1);
  CHECK(g.fold(-1) == 15);
  CHECK(g.fold(-8) == 8);
  CHECK(g.fold(3) == 3);
  CHECK(g.wavenumber(1) == doctest::Approx(2.0 * kPi / 8.0).epsilon(1e-15));
  CHECK_THROWS_AS(g.signed_mode(16), hsl::DomainError);
}

TEST_CASE("spectral transform round trip") {
  Grid g(3, 16, 5.0);
  ProfileField f = random_band_limited(g, 5, 1234);
  ProfileField back = to_physical(to_spectral(f));
  const double scale = f.values.abs().maxCoeff();
  CHECK((back.values - f.values).abs().maxCoeff() < 1e-13 * scale);
}

TEST_CASE("plane waves map to single spectral coefficients") {
  Grid g(2, 16, 2.0 * kPi);
  ProfileField f = plane_wave(g, {3, -2}, complex<double>(0.7, -0.4));
  SpectralField c = to_spectral(f);
  const std::int64_t slot = mode_slot(g, {3, -2});
  CHECK(std::abs(c.coeffs[slot] - complex<double>(0.7, -0.4)) < 1e-13);
  c.coeffs[slot] = 0.0;
  CHECK(c.coeffs.abs().maxCoeff() < 1e-13);
}

TEST_CASE("derivatives and Laplacian act as multipliers on plane waves") {
  Grid g(2, 16, 4.0);
  ProfileField f = plane_wave(g, {3, -2}, 1.0);
  const double k0 = 2.0 * kPi * 3 / g.length;
  const double k1 = 2.0 * kPi * -2 / g.length;

  ProfileField d0 = partial(f, 0);
  Eigen::ArrayXcd expected = f.values * complex<double>(0.0, k0);
  CHECK((d0.values - expected).abs().maxCoeff() < 1e-12 * std::abs(k0));

  ProfileField lap = laplacian_of(f);
  expected = f.values * (-(k0 * k0 + k1 * k1));
  CHECK((lap.values - expected).abs().maxCoeff() <
        1e-12 * (k0 * k0 + k1 * k1));

  CHECK_THROWS_AS(partial(f, 2), hsl::DomainError);
  CHECK_THROWS_AS(partial(f, -1), hsl::DomainError);
}

TEST_CASE("grid L2 norm obeys the spectral identity") {
  Grid g(2, 16, 3.0);
  ProfileField f = random_band_limited(g, 4, 99);
  SpectralField c = to_spectral(f);
  const double via_coeffs =
      std::pow(g.length, g.dim / 2.0) * std::sqrt(c.coeffs.abs2().sum());
  CHECK(l2_norm(f) == doctest::Approx(via_coeffs).epsilon(1e-13));

  ProfileField wave = plane_wave(g, {2, 1}, complex<double>(0.0, 0.5));
  CHECK(l2_norm(wave) ==
        doctest::Approx(0.5 * std::pow(g.length, g.dim / 2.0)).epsilon(1e-13));
}

TEST_CASE("smoothing multiplier scales modes and removes the mean mode") {
  Grid g(2, 16, 2.0 * kPi);
  ProfileField f = plane_wave(g, {0, 3}, 1.0);
  SpectralField c = to_spectral(f);
  SpectralField r = riesz(c, -2.0);
  const std::int64_t slot = mode_slot(g, {0, 3});
  CHECK(std::abs(r.coeffs[slot] - complex<double>(1.0 / 9.0, 0.0)) < 1e-13);

  ProfileField constant = zero_profile(g);
  constant.values = complex<double>(2.5, 0.0);
  SpectralField rc = riesz(to_spectral(constant), -1.0);
  CHECK(rc.coeffs.abs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(riesz(c, 0.0), hsl::DomainError);
  CHECK_THROWS_AS(riesz(c, 1.0), hsl::DomainError);
}

TEST_CASE("dealiasing keeps modes up to a third of the resolution") {
  Grid g(1, 12, 1.0);
  CHECK(g.dealias_cutoff() == 4);
  ProfileField keep = plane_wave(g, {4}, 1.0);
  ProfileField kill = plane_wave(g, {5}, 1.0);
  CHECK(to_physical(dealiased(to_spectral(keep))).values.abs().maxCoeff() >
        0.9);
  CHECK(to_physical(dealiased(to_spectral(kill))).values.abs().maxCoeff() <
        1e-13);
  ProfileField killneg = plane_wave(g, {-5}, 1.0);
  CHECK(to_physical(dealiased(to_spectral(killneg))).values.abs().maxCoeff() <
        1e-13);
}

TEST_CASE("band limiting projects sampled fields onto the safe band") {
  Grid g(2, 12, 2.0 * kPi);
  ProfileField f = plane_wave(g, {2, 1}, 0.5);
  ProfileField high = plane_wave(g, {5, 0}, 1.0);
  ProfileField mixed{g, f.values + high.values};
  ProfileField cut = band_limit(mixed);
  CHECK((cut.values - f.values).abs().maxCoeff() <= 1e-13);
  // real fields respect the same projection and stay real
  RealField r = real_part(mixed);
  RealField rcut = band_limit(r);
  RealField rref = real_part(f);
  CHECK((rcut.values - rref.values).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("interaction potential matches the analytic single-mode answer") {
  Grid g(3, 16, 8.0 * kPi);
  ProfileField w1 = plane_wave(g, {0, 0, 1}, 1.0);
  ProfileField w2 = zero_profile(g);
  w2.values = complex<double>(1.0, 0.0);
  const double lambda = 2.0;
  const double mu = 1.0;
  RealField v = interaction_potential(w1, w2, lambda, mu);
  // Re(w1) = cos(k x3) with k = 2 pi / L; multiplier gives |k|^(mu-3) = k^-2.
  const double k = 2.0 * kPi / g.length;
  for (std::int64_t idx = 0; idx < v.values.size(); idx += 97) {
    const double expected =
        lambda * std::pow(k, -2.0) * std::cos(k * coord(g, idx, 2));
    CHECK(v.values[idx] == doctest::Approx(expected).epsilon(1e-10));
  }
  CHECK(std::abs(v.values.mean()) < 1e-13);
  CHECK_THROWS_AS(interaction_potential(w1, w2, 1.0, 0.0), hsl::DomainError);
  CHECK_THROWS_AS(interaction_potential(w1, w2, 1.0, 3.0), hsl::DomainError);
  Grid other(3, 16, 4.0);
  ProfileField w3 = zero_profile(other);
  CHECK_THROWS_AS(interaction_potential(w1, w3, 1.0, 1.0), hsl::DomainError);
}

TEST_CASE("Sobolev-type norm of a plane wave is the multiplier sum") {
  Grid g(3, 16, 4.0);
  const std::vector<int> mode = {2, -1, 0};
  ProfileField f = plane_wave(g, mode, 1.0);
  const double a = std::abs(2.0 * kPi * mode[0] / g.length);
  const double b = std::abs(2.0 * kPi * mode[1] / g.length);
  const double box = std::pow(g.length, 1.5);
  // Orders 0..2 over 3 axes: 1, (a + b), (a^2 + ab + b^2).
  const double expected =
      box * (1.0 + (a + b) + (a * a + a * b + b * b));
  CHECK(sobolev_norm(f, 2) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(sobolev_norm(f, 0) == doctest::Approx(box).epsilon(1e-13));
  CHECK_THROWS_AS(sobolev_norm(f, -1), hsl::DomainError);
}

TEST_CASE("phase norm assembles its four ingredients") {
  Grid g(3, 16, 2.0 * kPi);
  RealField phi = zero_real(g);
  for (std::int64_t idx = 0; idx < phi.values.size(); ++idx)
    phi.values[idx] = std::cos(coord(g, idx, 2));
  // sup = 1; |d3 phi|_L6 = ((2 pi)^3 * 5/16)^(1/6); layers 2 and 4 are both
  // (2 pi)^(3/2) / sqrt(2) since the mode has unit wavenumber.
  const double l6 = std::pow(std::pow(2.0 * kPi, 3.0) * 5.0 / 16.0, 1.0 / 6.0);
  const double layer = std::pow(2.0 * kPi, 1.5) / std::sqrt(2.0);
  CHECK(phase_norm(phi, 2) ==
        doctest::Approx(1.0 + l6 + 2.0 * layer).epsilon(1e-12));
}

TEST_CASE("multi index enumeration") {
  auto all = multi_indices(3, 2);
  CHECK(all.size() == 6);
  for (const auto& alpha : all)
    CHECK(alpha[0] + alpha[1] + alpha[2] == 2);
  CHECK(all.front() == std::vector<int>{2, 0, 0});
  CHECK(all.back() == std::vector<int>{0, 0, 2});
  CHECK(multi_indices(2, 0).size() == 1);
  CHECK_THROWS_AS(multi_indices(0, 1), hsl::DomainError);
}

TEST_CASE("admissibility of regularity pairs") {
  CHECK(admissible(2, 2, 3, 1.0));
  CHECK(admissible(3, 3, 3, 1.0));
  CHECK(admissible(4, 4, 3, 1.0));
  CHECK_FALSE(admissible(1, 2, 3, 1.0));
  CHECK_FALSE(admissible(2, 3, 3, 1.0));
  CHECK_FALSE(admissible(3, 2, 3, 1.0));
  CHECK_FALSE(admissible(1, 1, 3, 1.0));
  CHECK(admissible(2, 2, 3, 1.0 + 1e-10));
  CHECK(admissible(2, 2, 3, 0.5));
  // Even dimension carries the extra strict margin condition.
  CHECK(admissible(3, 3, 4, 1.0));
  CHECK_FALSE(admissible(2, 2, 4, 1.0));
  CHECK_THROWS_AS(admissible(2, 2, 2, 0.5), hsl::DomainError);
  CHECK_THROWS_AS(admissible(2, 2, 3, 0.0), hsl::DomainError);
  CHECK_THROWS_AS(admissible(2, 2, 3, 1.5), hsl::DomainError);
  CHECK_THROWS_AS(admissible(-1, 2, 3, 1.0), hsl::DomainError);
}

TEST_CASE("random band-limited fields are deterministic in the seed") {
  Grid g(2, 16, 5.0);
  ProfileField a = random_band_limited(g, 3, 7);
  ProfileField b = random_band_limited(g, 3, 7);
  CHECK((a.values == b.values).all());
  ProfileField c = random_band_limited(g, 3, 8);
  CHECK((a.values - c.values).abs().maxCoeff() > 1e-6);
  CHECK_THROWS_AS(random_band_limited(g, 8, 7), hsl::DomainError);
  CHECK_THROWS_AS(random_band_limited(g, -1, 7), hsl::DomainError);
}

TEST_CASE("random fields do not depend on the resolution") {
  Grid coarse(2, 16, 5.0);
  Grid fine(2, 32, 5.0);
  ProfileField a = random_band_limited(coarse, 3, 31);
  ProfileField b = random_band_limited(fine, 3, 31);
  SpectralField ca = to_spectral(a);
  SpectralField cb = to_spectral(b);
  for (int m0 = -3; m0 <= 3; ++m0)
    for (int m1 = -3; m1 <= 3; ++m1) {
      const auto va = ca.coeffs[mode_slot(coarse, {m0, m1})];
      const auto vb = cb.coeffs[mode_slot(fine, {m0, m1})];
      CHECK(std::abs(va - vb) < 1e-13);
    }
  CHECK(l2_norm(a) == doctest::Approx(l2_norm(b)).epsilon(1e-12));
}

TEST_CASE("snapshot files round trip bit for bit") {
  Grid g(2, 12, 3.5);
  ProfileField f = random_band_limited(g, 4, 5);
  const std::string path = "snapshot_roundtrip.bin";
  save_profile(path, f);
  ProfileField loaded = load_profile(path);
  CHECK(loaded.grid == f.grid);
  CHECK((loaded.values == f.values).all());
  std::remove(path.c_str());

  const std::string bad = "snapshot_bad.bin";
  {
    std::ofstream out(bad, std::ios::binary);
    out.write("NOPE", 4);
  }
  CHECK_THROWS_AS(load_profile(bad), hsl::ConfigError);
  std::remove(bad.c_str());
  CHECK_THROWS_AS(load_profile("does_not_exist.bin"), hsl::ConfigError);

  const std::string trunc = "snapshot_trunc.bin";
  {
    std::ofstream out(trunc, std::ios::binary);
    out.write("HSL1", 4);
  }
  CHECK_THROWS_AS(load_profile(trunc), hsl::ConfigError);
  std::remove(trunc.c_str());
}
