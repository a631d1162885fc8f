#include "hsl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include <unsupported/Eigen/FFT>

namespace hsl::grid {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

std::int64_t axis_stride(const Grid& g, int axis) {
  return ipow(g.samples, g.dim - 1 - axis);
}

void require_axis(const Grid& g, int axis) {
  if (axis < 0 || axis >= g.dim)
    throw DomainError("axis " + std::to_string(axis) +
                      " out of range for dimension " + std::to_string(g.dim));
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DomainError("fields live on different grids");
}

// In-place complex FFT along one axis of the flattened array (forward is the
// unscaled DFT; inverse carries the engine's 1/N factor).
void transform_axis(Eigen::ArrayXcd& a, const Grid& g, int axis,
                    bool forward) {
  const int N = g.samples;
  const std::int64_t stride = axis_stride(g, axis);
  const std::int64_t block = stride * N;
  Eigen::VectorXcd line(N), out(N);
  for (std::int64_t base0 = 0; base0 < a.size(); base0 += block) {
    for (std::int64_t lo = 0; lo < stride; ++lo) {
      const std::int64_t base = base0 + lo;
      for (int t = 0; t < N; ++t) line[t] = a[base + t * stride];
      if (forward)
        engine().fwd(out, line);
      else
        engine().inv(out, line);
      for (int t = 0; t < N; ++t) a[base + t * stride] = out[t];
    }
  }
}

// Per-axis storage index of a flattened element.
int axis_index(std::int64_t idx, std::int64_t stride, int N) {
  return static_cast<int>((idx / stride) % N);
}

struct GaussianPair {
  std::mt19937_64 eng;
  explicit GaussianPair(std::uint64_t seed) : eng(seed) {}
  std::pair<double, double> operator()() {
    const double u1 =
        std::ldexp(static_cast<double>((eng() >> 11) + 1), -53);  // (0, 1]
    const double u2 =
        std::ldexp(static_cast<double>(eng() >> 11), -53);  // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }
};

void write_raw(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::ifstream& in, void* p, std::size_t n,
              const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n))
    throw ConfigError("snapshot " + path + ": truncated file");
}

}  // namespace

Grid::Grid(int dim_, int samples_, double length_)
    : dim(dim_), samples(samples_), length(length_) {
  if (dim < 1 || dim > 4)
    throw DomainError("grid dimension must lie in [1, 4]");
  if (samples < 2 || samples % 2 != 0)
    throw DomainError("per-axis sample count must be even and at least 2");
  if (!(length > 0.0) || !std::isfinite(length))
    throw DomainError("box length must be positive and finite");
}

std::int64_t Grid::size() const { return ipow(samples, dim); }

int Grid::fold(int mode) const {
  const int r = mode % samples;
  return r < 0 ? r + samples : r;
}

int Grid::signed_mode(int index) const {
  if (index < 0 || index >= samples)
    throw DomainError("mode storage index out of range");
  return index < samples / 2 ? index : index - samples;
}

double Grid::wavenumber(int index) const {
  return 2.0 * kPi * signed_mode(index) / length;
}

double Grid::cell_volume() const {
  return std::pow(length / samples, dim);
}

int Grid::dealias_cutoff() const { return samples / 3; }

ProfileField zero_profile(const Grid& g) {
  return {g, Eigen::ArrayXcd::Zero(g.size())};
}

RealField zero_real(const Grid& g) {
  return {g, Eigen::ArrayXd::Zero(g.size())};
}

SpectralField zero_spectral(const Grid& g) {
  return {g, Eigen::ArrayXcd::Zero(g.size())};
}

ProfileField complexify(const RealField& f) {
  ProfileField out{f.grid, Eigen::ArrayXcd(f.values.size())};
  out.values = f.values.cast<std::complex<double>>();
  return out;
}

RealField real_part(const ProfileField& f) {
  return {f.grid, f.values.real()};
}

SpectralField to_spectral(const ProfileField& f) {
  SpectralField out{f.grid, f.values};
  for (int axis = 0; axis < f.grid.dim; ++axis)
    transform_axis(out.coeffs, f.grid, axis, true);
  out.coeffs *= 1.0 / static_cast<double>(f.grid.size());
  return out;
}

ProfileField to_physical(const SpectralField& c) {
  ProfileField out{c.grid, c.coeffs};
  for (int axis = 0; axis < c.grid.dim; ++axis)
    transform_axis(out.values, c.grid, axis, false);
  out.values *= static_cast<double>(c.grid.size());
  return out;
}

SpectralField derivative(const SpectralField& c, int axis) {
  require_axis(c.grid, axis);
  SpectralField out{c.grid, Eigen::ArrayXcd(c.coeffs.size())};
  const std::int64_t stride = axis_stride(c.grid, axis);
  const int N = c.grid.samples;
  for (std::int64_t idx = 0; idx < c.coeffs.size(); ++idx) {
    const double k = c.grid.wavenumber(axis_index(idx, stride, N));
    out.coeffs[idx] = c.coeffs[idx] * std::complex<double>(0.0, k);
  }
  return out;
}

ProfileField partial(const ProfileField& f, int axis) {
  return to_physical(derivative(to_spectral(f), axis));
}

RealField partial(const RealField& f, int axis) {
  return real_part(partial(complexify(f), axis));
}

namespace {

SpectralField laplacian_spectral(const SpectralField& c) {
  SpectralField out{c.grid, c.coeffs};
  const int N = c.grid.samples;
  for (std::int64_t idx = 0; idx < c.coeffs.size(); ++idx) {
    double k2 = 0.0;
    for (int axis = 0; axis < c.grid.dim; ++axis) {
      const double k = c.grid.wavenumber(
          axis_index(idx, axis_stride(c.grid, axis), N));
      k2 += k * k;
    }
    out.coeffs[idx] *= -k2;
  }
  return out;
}

}  // namespace

ProfileField laplacian_of(const ProfileField& f) {
  return to_physical(laplacian_spectral(to_spectral(f)));
}

RealField laplacian_of(const RealField& f) {
  return real_part(laplacian_of(complexify(f)));
}

SpectralField dealiased(const SpectralField& c) {
  SpectralField out{c.grid, c.coeffs};
  const int N = c.grid.samples;
  const int cut = c.grid.dealias_cutoff();
  for (std::int64_t idx = 0; idx < c.coeffs.size(); ++idx) {
    for (int axis = 0; axis < c.grid.dim; ++axis) {
      const int m = c.grid.signed_mode(
          axis_index(idx, axis_stride(c.grid, axis), N));
      if (m > cut || m < -cut) {
        out.coeffs[idx] = 0.0;
        break;
      }
    }
  }
  return out;
}

ProfileField band_limit(const ProfileField& f) {
  return to_physical(dealiased(to_spectral(f)));
}

RealField band_limit(const RealField& f) {
  return real_part(to_physical(dealiased(to_spectral(complexify(f)))));
}

void require_band_limited(const ProfileField& f, const char* what) {
  const SpectralField s = to_spectral(f);
  const double top = s.coeffs.abs().maxCoeff();
  if (top == 0.0) return;
  const int N = f.grid.samples;
  const int cut = f.grid.dealias_cutoff();
  for (std::int64_t idx = 0; idx < s.coeffs.size(); ++idx) {
    bool outside = false;
    for (int axis = 0; axis < f.grid.dim; ++axis) {
      const int m =
          f.grid.signed_mode(axis_index(idx, axis_stride(f.grid, axis), N));
      if (m > cut || m < -cut) {
        outside = true;
        break;
      }
    }
    if (outside && std::abs(s.coeffs[idx]) > 1e-12 * top) {
      throw DomainError(std::string(what) +
                        " must be band-limited to the dealiasing cutoff");
    }
  }
}

void require_band_limited(const RealField& f, const char* what) {
  require_band_limited(complexify(f), what);
}

ProfileField transport_apply(const RealField& phi, const ProfileField& f) {
  require_same_grid(phi.grid, f.grid);
  ProfileField out = zero_profile(f.grid);
  for (int d = 0; d < f.grid.dim; ++d) {
    const RealField dphi = partial(phi, d);
    const ProfileField df = partial(f, d);
    out.values += 2.0 * (dphi.values.cast<std::complex<double>>() * df.values);
  }
  const RealField lap = laplacian_of(phi);
  out.values += lap.values.cast<std::complex<double>>() * f.values;
  return band_limit(out);
}

RealField gradient_dot(const RealField& a, const RealField& b) {
  require_same_grid(a.grid, b.grid);
  RealField out = zero_real(a.grid);
  for (int d = 0; d < a.grid.dim; ++d) {
    out.values += partial(a, d).values * partial(b, d).values;
  }
  return band_limit(out);
}

Eigen::ArrayXd squared_wavenumbers(const Grid& g) {
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(g.size());
  const int N = g.samples;
  for (std::int64_t idx = 0; idx < out.size(); ++idx) {
    double k2 = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
      const double k = g.wavenumber(axis_index(idx, axis_stride(g, axis), N));
      k2 += k * k;
    }
    out[idx] = k2;
  }
  return out;
}

ProfileField laplacian_flow(const ProfileField& f, double c) {
  if (!std::isfinite(c)) {
    throw DomainError("free-flow coefficient must be finite");
  }
  SpectralField hat = to_spectral(f);
  const Eigen::ArrayXd theta = -c * squared_wavenumbers(f.grid);
  hat.coeffs *= (std::complex<double>(0.0, 1.0) *
                 theta.cast<std::complex<double>>())
                    .exp();
  return to_physical(hat);
}

SpectralField riesz(const SpectralField& c, double exponent) {
  if (!(exponent < 0.0))
    throw DomainError(
        "riesz multiplier: exponent must be negative (smoothing)");
  SpectralField out{c.grid, c.coeffs};
  const int N = c.grid.samples;
  for (std::int64_t idx = 0; idx < c.coeffs.size(); ++idx) {
    double k2 = 0.0;
    for (int axis = 0; axis < c.grid.dim; ++axis) {
      const double k = c.grid.wavenumber(
          axis_index(idx, axis_stride(c.grid, axis), N));
      k2 += k * k;
    }
    if (k2 == 0.0)
      out.coeffs[idx] = 0.0;
    else
      out.coeffs[idx] *= std::pow(k2, 0.5 * exponent);
  }
  return out;
}

RealField interaction_potential(const ProfileField& w1, const ProfileField& w2,
                                double lambda, double mu) {
  require_same_grid(w1.grid, w2.grid);
  const int n = w1.grid.dim;
  if (!(mu > 0.0) || !(mu < n))
    throw DomainError("interaction exponent must lie in (0, dim)");
  RealField dens{w1.grid, (w1.values * w2.values.conjugate()).real()};
  const SpectralField smoothed =
      riesz(dealiased(to_spectral(complexify(dens))), mu - n);
  RealField out = real_part(to_physical(smoothed));
  out.values *= lambda;
  out.values -= out.values.mean();
  return out;
}

double l2_norm(const ProfileField& f) {
  return std::sqrt(f.values.abs2().sum()) *
         std::pow(f.grid.length / f.grid.samples, f.grid.dim / 2.0);
}

double l2_norm(const RealField& f) {
  return std::sqrt(f.values.square().sum()) *
         std::pow(f.grid.length / f.grid.samples, f.grid.dim / 2.0);
}

namespace {

template <typename Field>
double lp_norm_impl(const Field& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp norm requires p >= 1");
  if (std::isinf(p)) return f.values.abs().maxCoeff();
  if (p == 2.0) return l2_norm(f);
  const double sum = f.values.abs().pow(p).sum();
  return std::pow(f.grid.cell_volume() * sum, 1.0 / p);
}

}  // namespace

double lp_norm(const ProfileField& f, double p) { return lp_norm_impl(f, p); }
double lp_norm(const RealField& f, double p) { return lp_norm_impl(f, p); }

double sup_norm(const ProfileField& f) { return f.values.abs().maxCoeff(); }
double sup_norm(const RealField& f) { return f.values.abs().maxCoeff(); }

double derivative_layer_norm(const SpectralField& c, int order) {
  if (order < 0) throw DomainError("derivative order must be nonnegative");
  const int N = c.grid.samples;
  const int n = c.grid.dim;
  const double box_factor = std::pow(c.grid.length, n / 2.0);
  double total = 0.0;
  for (const std::vector<int>& alpha : multi_indices(n, order)) {
    double sum = 0.0;
    for (std::int64_t idx = 0; idx < c.coeffs.size(); ++idx) {
      double w = 1.0;
      for (int axis = 0; axis < n; ++axis) {
        if (alpha[axis] == 0) continue;
        const double k = c.grid.wavenumber(
            axis_index(idx, axis_stride(c.grid, axis), N));
        w *= std::pow(k * k, alpha[axis]);
      }
      sum += w * std::norm(c.coeffs[idx]);
    }
    total += box_factor * std::sqrt(sum);
  }
  return total;
}

double sobolev_norm(const ProfileField& f, int k) {
  if (k < 0) throw DomainError("regularity order must be nonnegative");
  const SpectralField c = to_spectral(f);
  double total = 0.0;
  for (int j = 0; j <= k; ++j) total += derivative_layer_norm(c, j);
  return total;
}

double sobolev_norm(const RealField& f, int k) {
  return sobolev_norm(complexify(f), k);
}

double phase_norm(const RealField& f, int ell) {
  if (ell < 0) throw DomainError("phase regularity must be nonnegative");
  const int n = f.grid.dim;
  const int ell0 = n / 2;
  const double r0 = (n % 2 == 1) ? 2.0 * n
                                 : std::numeric_limits<double>::infinity();
  const SpectralField c = to_spectral(complexify(f));
  double total = sup_norm(f);
  for (int axis = 0; axis < n; ++axis)
    total += lp_norm(real_part(to_physical(derivative(c, axis))), r0);
  total += derivative_layer_norm(c, ell0 + 1);
  total += derivative_layer_norm(c, ell + 2);
  return total;
}

std::vector<std::vector<int>> multi_indices(int dim, int order) {
  if (dim < 1 || order < 0)
    throw DomainError("multi_indices: invalid dimension or order");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(dim, 0);
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == dim - 1) {
      cur[pos] = rem;
      out.push_back(cur);
      return;
    }
    for (int a = rem; a >= 0; --a) {
      cur[pos] = a;
      self(self, pos + 1, rem - a);
    }
  };
  rec(rec, 0, order);
  return out;
}

bool admissible(int k, int ell, int n, double mu) {
  if (n < 3) throw DomainError("admissible: dimension must be at least 3");
  constexpr double eps = 1e-9;
  if (!(mu > 0.0) || mu > n - 2.0 + eps)
    throw DomainError(
        "admissible: interaction exponent must lie in (0, n - 2]");
  if (k < 0 || ell < 0)
    throw DomainError("admissible: regularity orders must be nonnegative");
  if (k > ell) return false;
  if (2 * ell <= n) return false;
  const double cap = std::min(n / 2.0 + 2.0 * k, static_cast<double>(n + k));
  const double need = ell + 2.0 + mu;
  if (need > cap + eps) return false;
  if (std::abs(need - (n + k)) <= eps && 2 * k <= n) return false;
  if (n % 2 == 0 && !(n / 2.0 + 3.0 + mu < cap - eps)) return false;
  return true;
}

ProfileField random_band_limited(const Grid& g, int radius,
                                 std::uint64_t seed) {
  if (radius < 0) throw DomainError("band radius must be nonnegative");
  if (radius > g.samples / 2 - 1)
    throw DomainError("band radius " + std::to_string(radius) +
                      " not representable at " + std::to_string(g.samples) +
                      " samples per axis");
  SpectralField c = zero_spectral(g);
  GaussianPair gauss(seed);
  std::vector<int> mode(g.dim, -radius);
  const double r2 = static_cast<double>(radius) * radius;
  while (true) {
    double m2 = 0.0;
    std::int64_t idx = 0;
    for (int axis = 0; axis < g.dim; ++axis) {
      m2 += static_cast<double>(mode[axis]) * mode[axis];
      idx += static_cast<std::int64_t>(g.fold(mode[axis])) *
             axis_stride(g, axis);
    }
    const auto [zr, zi] = gauss();
    const double amp = (radius == 0) ? 1.0 : std::exp(-m2 / r2);
    c.coeffs[idx] = std::complex<double>(zr, zi) * amp;
    int axis = g.dim - 1;
    while (axis >= 0 && mode[axis] == radius) mode[axis--] = -radius;
    if (axis < 0) break;
    ++mode[axis];
  }
  return to_physical(c);
}

void save_profile(const std::string& path, const ProfileField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("snapshot " + path + ": cannot open for write");
  out.write("HSL1", 4);
  const std::int64_t dim = f.grid.dim;
  const std::int64_t samples = f.grid.samples;
  write_raw(out, &dim, sizeof dim);
  write_raw(out, &samples, sizeof samples);
  write_raw(out, &f.grid.length, sizeof f.grid.length);
  for (std::int64_t idx = 0; idx < f.values.size(); ++idx) {
    const double re = f.values[idx].real();
    const double im = f.values[idx].imag();
    write_raw(out, &re, sizeof re);
    write_raw(out, &im, sizeof im);
  }
  if (!out) throw ConfigError("snapshot " + path + ": write failed");
}

ProfileField load_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("snapshot " + path + ": cannot open");
  char magic[4];
  read_raw(in, magic, 4, path);
  if (std::memcmp(magic, "HSL1", 4) != 0)
    throw ConfigError("snapshot " + path + ": bad magic");
  std::int64_t dim = 0, samples = 0;
  double length = 0.0;
  read_raw(in, &dim, sizeof dim, path);
  read_raw(in, &samples, sizeof samples, path);
  read_raw(in, &length, sizeof length, path);
  if (dim < 1 || dim > 4 || samples < 2 || samples > 4096 ||
      samples % 2 != 0 || !(length > 0.0) || !std::isfinite(length))
    throw ConfigError("snapshot " + path + ": invalid header");
  ProfileField f = zero_profile(
      Grid(static_cast<int>(dim), static_cast<int>(samples), length));
  for (std::int64_t idx = 0; idx < f.values.size(); ++idx) {
    double re = 0.0, im = 0.0;
    read_raw(in, &re, sizeof re, path);
    read_raw(in, &im, sizeof im, path);
    f.values[idx] = std::complex<double>(re, im);
  }
  char extra;
  in.read(&extra, 1);
  if (in.gcount() != 0)
    throw ConfigError("snapshot " + path + ": trailing data");
  return f;
}

}  // namespace hsl::grid
