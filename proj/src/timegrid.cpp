#include "hsl/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace hsl::timegrid {

namespace {

constexpr double kLatticeSnap = 1e-9;

}  // namespace

TimeGrid::TimeGrid(double t_end, int steps_per_decade) : spd_(steps_per_decade) {
  if (!(steps_per_decade >= 1)) {
    throw DomainError("TimeGrid requires steps_per_decade >= 1");
  }
  if (!(t_end > 1.0)) {
    throw DomainError("TimeGrid requires an end time greater than 1");
  }
  const double exact = spd_ * std::log10(t_end);
  // Round to the lattice when the request is within rounding noise of a node,
  // otherwise extend upward to the next node.
  const double nearest = std::round(exact);
  if (std::abs(exact - nearest) <= kLatticeSnap * spd_) {
    steps_ = static_cast<int>(nearest);
  } else {
    steps_ = static_cast<int>(std::ceil(exact));
  }
  if (steps_ < 1) steps_ = 1;
}

double TimeGrid::dtau() const { return std::log(10.0) / spd_; }

double TimeGrid::tau(int i) const { return i * dtau(); }

double TimeGrid::t(int i) const {
  return std::pow(10.0, static_cast<double>(i) / spd_);
}

int TimeGrid::nearest_node(double t_query) const {
  if (!(t_query > 0.0)) {
    throw DomainError("nearest_node requires a positive time");
  }
  const double exact = spd_ * std::log10(t_query);
  long node = std::lround(exact);
  if (node < 0) node = 0;
  if (node > steps_) node = steps_;
  return static_cast<int>(node);
}

std::vector<double> cumulative_integral(const std::vector<double>& f,
                                        double h) {
  return cumulative_samples(f, h);
}

double fit_log_slope(const std::vector<double>& values, double h) {
  if (!(h > 0.0)) {
    throw DomainError("fit_log_slope requires a positive step");
  }
  const std::size_t n = values.size();
  if (n < 2) {
    throw TailFitError("fit_log_slope needs at least two samples");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] > 0.0)) {
      throw TailFitError("fit_log_slope requires positive samples");
    }
    const double x = i * h;
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

double drift_factor(const std::vector<double>& series, int steps_per_decade) {
  if (series.empty()) {
    throw DomainError("drift_factor requires at least one sample");
  }
  if (steps_per_decade < 1) {
    throw DomainError("drift_factor requires steps_per_decade >= 1");
  }
  const int last = static_cast<int>(series.size()) - 1;
  const int earlier = std::max(0, last - steps_per_decade);
  const double a = series[last];
  const double b = series[earlier];
  if (b == 0.0) {
    return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return a / b;
}

}  // namespace hsl::timegrid
