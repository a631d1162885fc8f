#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "hsl/errors.hpp"
#include "hsl/estfun.hpp"
#include "hsl/grid.hpp"
#include "hsl/hierarchy.hpp"
#include "hsl/params.hpp"
#include "hsl/timegrid.hpp"
#include "hsl/transport.hpp"

namespace {

using hsl::grid::ProfileField;
using hsl::grid::RealField;

ProfileField make_seed(const hsl::grid::Grid& g, int radius,
                       std::uint64_t seed, double target_h2) {
  auto f = hsl::grid::random_band_limited(g, radius, seed);
  f.values *= target_h2 / hsl::grid::sobolev_norm(f, 2);
  return f;
}

RealField make_phase_data(const hsl::grid::Grid& g, int radius,
                          std::uint64_t seed, double amplitude) {
  auto f = hsl::grid::real_part(hsl::grid::random_band_limited(g, radius, seed));
  f.values *= amplitude / f.values.abs().maxCoeff();
  return hsl::grid::band_limit(f);
}

template <typename Derived>
double max_abs(const Eigen::ArrayBase<Derived>& a) {
  return a.abs().maxCoeff();
}

// Shared first-order pipeline: gamma=0.6, two decades at 16 steps each.
struct Pipeline {
  hsl::ModelParams params;
  hsl::timegrid::TimeGrid tg{100.0, 16};
  ProfileField w_plus;
  hsl::hier::Hierarchy h;
  std::vector<RealField> phi;

  Pipeline()
      : w_plus(make_seed(params.make_grid(), 2, 7, 1.0)),
        h(hsl::hier::solve_hierarchy(w_plus, 1, tg, params)) {
    for (int i = 0; i < tg.nodes(); ++i) phi.push_back(h.phase_sum(0, i));
  }
};

const Pipeline& pipeline() {
  static const Pipeline p;
  return p;
}

std::vector<RealField> zero_phase(const hsl::grid::Grid& g, int nodes) {
  return std::vector<RealField>(nodes, hsl::grid::zero_real(g));
}

}  // namespace

TEST_CASE("zero phase transports the data unchanged") {
  hsl::ModelParams params;
  const auto g = params.make_grid();
  hsl::timegrid::TimeGrid tg(100.0, 16);
  const auto w_plus = make_seed(g, 2, 7, 1.0);

  SUBCASE("empty partial sum from the order-zero pipeline") {
    auto h = hsl::hier::solve_hierarchy(w_plus, 0, tg, params);
    std::vector<RealField> phi;
    for (int i = 0; i < tg.nodes(); ++i) phi.push_back(h.phase_sum(-1, i));
    auto V = hsl::transport::solve_V(w_plus, phi, tg);
    for (int i = 0; i < tg.nodes(); ++i) {
      CHECK(max_abs(V[i].values - w_plus.values) == 0.0);
    }
  }

  SUBCASE("phase remainder keeps its data on a zero phase") {
    RealField c = hsl::grid::zero_real(g);
    c.values += 0.7;
    auto chi = hsl::transport::solve_chi(c, zero_phase(g, tg.nodes()), tg);
    for (int i = 0; i < tg.nodes(); ++i) {
      CHECK(max_abs(chi[i].values - 0.7) == 0.0);
    }
  }
}

TEST_CASE("settling toward the far-end data follows the slow envelope") {
  const Pipeline& pl = pipeline();
  auto V = hsl::transport::solve_V(pl.w_plus, pl.phi, pl.tg);
  auto rep = hsl::transport::compare_with_hierarchy(V, pl.h, pl.params.k);

  // Far-end data is imposed bitwise, so the terminal deviation vanishes.
  CHECK(rep.rows.back().norm_dev_seed == 0.0);
  CHECK(rep.rows.back().ratio_seed == 0.0);

  CHECK(rep.sup_ratio_seed > 1e-5);
  CHECK(rep.sup_ratio_seed < 1e-4);
  CHECK(rep.drift_seed > 0.5);
  CHECK(rep.drift_seed < 1.2);

  CHECK(hsl::transport::l2_drift(V) <= 1e-6);

  // To first order in the coupling the deviation from the data is the
  // difference of the first hierarchy correction across the horizon.
  double worst = 0.0;
  for (int i = 0; i + 8 <= pl.tg.steps(); ++i) {
    ProfileField lhs{pl.w_plus.grid, V[i].values - pl.w_plus.values};
    ProfileField rhs{pl.w_plus.grid,
                     pl.h.w[1][i].values - pl.h.w[1][pl.tg.steps()].values};
    ProfileField d{pl.w_plus.grid, lhs.values - rhs.values};
    worst = std::max(worst, hsl::grid::sobolev_norm(d, 1) /
                                hsl::grid::sobolev_norm(rhs, 1));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("settling onto the amplitude sum follows the fast envelope") {
  const Pipeline& pl = pipeline();

  SUBCASE("the far-end amplitude sum as data exposes the rate") {
    auto V = hsl::transport::solve_V(pl.h.amplitude_sum(1, pl.tg.steps()),
                                     pl.phi, pl.tg);
    auto rep = hsl::transport::compare_with_hierarchy(V, pl.h, pl.params.k);
    CHECK(rep.rows[0].ratio_sum > 1e-10);
    CHECK(rep.sup_ratio_sum < 1e-6);
    CHECK(rep.drift_sum > 0.5);
    CHECK(rep.drift_sum < 1.0);
    CHECK(rep.rows.back().norm_dev_sum == 0.0);
  }

  SUBCASE("zero coupling gives identically zero ratios") {
    hsl::ModelParams params;
    params.lambda = 0.0;
    const auto g = params.make_grid();
    hsl::timegrid::TimeGrid tg(100.0, 8);
    const auto w_plus = make_seed(g, 2, 7, 1.0);
    auto h = hsl::hier::solve_hierarchy(w_plus, 1, tg, params);
    std::vector<RealField> phi;
    for (int i = 0; i < tg.nodes(); ++i) phi.push_back(h.phase_sum(0, i));
    auto V = hsl::transport::solve_V(w_plus, phi, tg);
    auto rep = hsl::transport::compare_with_hierarchy(V, h, params.k);
    for (const auto& row : rep.rows) {
      CHECK(row.ratio_seed == 0.0);
      CHECK(row.ratio_sum == 0.0);
    }
    CHECK(rep.sup_ratio_sum == 0.0);
  }

  SUBCASE("at order zero the sum comparison collapses onto the data") {
    hsl::ModelParams params;
    const auto g = params.make_grid();
    hsl::timegrid::TimeGrid tg(100.0, 8);
    const auto w_plus = make_seed(g, 2, 7, 1.0);
    auto h = hsl::hier::solve_hierarchy(w_plus, 0, tg, params);
    std::vector<RealField> phi;
    for (int i = 0; i < tg.nodes(); ++i) phi.push_back(h.phase_sum(-1, i));
    auto V = hsl::transport::solve_V(w_plus, phi, tg);
    auto rep = hsl::transport::compare_with_hierarchy(V, h, params.k);
    for (const auto& row : rep.rows) {
      CHECK(row.norm_dev_seed == 0.0);
      CHECK(row.norm_dev_sum == 0.0);
      CHECK(row.ratio_seed == row.ratio_sum);
    }
    CHECK(rep.drift_seed == 1.0);
    CHECK(rep.drift_sum == 1.0);
  }
}

TEST_CASE("the backward march is linear in the data") {
  hsl::ModelParams params;
  const auto g = params.make_grid();
  hsl::timegrid::TimeGrid tg(100.0, 8);
  const auto w_plus = make_seed(g, 2, 7, 1.0);
  auto h = hsl::hier::solve_hierarchy(w_plus, 1, tg, params);
  std::vector<RealField> phi;
  for (int i = 0; i < tg.nodes(); ++i) phi.push_back(h.phase_sum(0, i));

  const auto v_plus = make_seed(g, 2, 23, 0.8);
  ProfileField combo{g, 0.3 * w_plus.values + 1.7 * v_plus.values};
  auto Vc = hsl::transport::solve_V(combo, phi, tg);
  auto Va = hsl::transport::solve_V(w_plus, phi, tg);
  auto Vb = hsl::transport::solve_V(v_plus, phi, tg);
  for (int i = 0; i < tg.nodes(); ++i) {
    ProfileField d{g, Vc[i].values -
                          (0.3 * Va[i].values + 1.7 * Vb[i].values)};
    CHECK(hsl::grid::l2_norm(d) <= 1e-10 * hsl::grid::l2_norm(Vc[i]));
  }
}

TEST_CASE("halving the step size reduces the error sixteenfold") {
  hsl::ModelParams params;
  const auto g = params.make_grid();
  const auto w_plus = make_seed(g, 2, 7, 1.0);
  std::vector<std::vector<ProfileField>> V;
  for (int spd : {8, 16, 32}) {
    hsl::timegrid::TimeGrid tg(100.0, spd);
    auto h = hsl::hier::solve_hierarchy(w_plus, 1, tg, params);
    std::vector<RealField> phi;
    for (int i = 0; i < tg.nodes(); ++i) phi.push_back(h.phase_sum(0, i));
    V.push_back(hsl::transport::solve_V(w_plus, phi, tg));
  }
  auto gap = [&](const std::vector<ProfileField>& a,
                 const std::vector<ProfileField>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ProfileField d{g, a[i].values - b[2 * i].values};
      worst = std::max(worst, hsl::grid::l2_norm(d));
    }
    return worst;
  };
  const double order = std::log2(gap(V[0], V[1]) / gap(V[1], V[2]));
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("steps reject when the mesh is too coarse for the phase") {
  const Pipeline& pl = pipeline();
  hsl::timegrid::TimeGrid tg(100.0, 8);
  hsl::ModelParams params;
  auto h = hsl::hier::solve_hierarchy(pl.w_plus, 1, tg, params);
  std::vector<RealField> phi;
  for (int i = 0; i < tg.nodes(); ++i) {
    phi.push_back(h.phase_sum(0, i));
    phi.back().values *= 1e6;
  }
  CHECK_THROWS_AS(hsl::transport::solve_V(pl.w_plus, phi, tg),
                  hsl::StepRejectedError);
}

TEST_CASE("the data split between amplitude and phase does not matter") {
  const Pipeline& pl = pipeline();
  const auto g = pl.params.make_grid();

  SUBCASE("no phase data gives bitwise-identical runs") {
    CHECK(hsl::transport::gauge_check_transport(
              pl.w_plus, hsl::grid::zero_real(g), pl.phi, pl.tg) == 0.0);
  }

  SUBCASE("a constant phase commutes with the march") {
    RealField c = hsl::grid::zero_real(g);
    c.values += 0.7;
    CHECK(hsl::transport::gauge_check_transport(pl.w_plus, c, pl.phi, pl.tg) <=
          1e-10);
  }

  SUBCASE("a random band-limited phase stays within the contract") {
    const RealField psi = make_phase_data(g, 1, 11, 0.25);
    CHECK(hsl::transport::gauge_check_transport(pl.w_plus, psi, pl.phi,
                                                pl.tg) <= 1e-6);
  }
}

TEST_CASE("the phase remainder settles onto its data") {
  const Pipeline& pl = pipeline();
  const auto g = pl.params.make_grid();
  const RealField psi = make_phase_data(g, 1, 11, 0.25);
  auto chi = hsl::transport::solve_chi(psi, pl.phi, pl.tg);
  auto rows = hsl::transport::chi_deviation(chi, psi, pl.params.gamma,
                                            pl.params.ell, pl.tg);
  CHECK(rows.back().norm_dev == 0.0);
  double sup = 0.0;
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.ratio));
    sup = std::max(sup, row.ratio);
  }
  CHECK(sup > 0.0);
  CHECK(sup < 1e-2);
}

TEST_CASE("repeating the march from half the horizon stays consistent") {
  const Pipeline& pl = pipeline();
  auto gap = hsl::transport::richardson_infinity_gap(pl.w_plus, pl.phi, pl.tg);
  CHECK(gap.t_end_short > 40.0);
  CHECK(gap.t_end_short < 60.0);
  CHECK(gap.gap > 0.0);
  CHECK(gap.gap <= 1e-3 * hsl::est::h_closed(pl.params.gamma,
                                             gap.t_end_short));
}

TEST_CASE("transport input validation") {
  const Pipeline& pl = pipeline();
  const auto g = pl.params.make_grid();

  SUBCASE("phase trajectory must cover the mesh") {
    std::vector<RealField> shorter(pl.phi.begin(), pl.phi.end() - 1);
    CHECK_THROWS_AS(hsl::transport::solve_V(pl.w_plus, shorter, pl.tg),
                    hsl::DomainError);
  }

  SUBCASE("meshes with fewer than four nodes are rejected") {
    hsl::timegrid::TimeGrid tiny(1.5, 2);
    CHECK_THROWS_AS(hsl::transport::solve_V(pl.w_plus,
                                            zero_phase(g, tiny.nodes()), tiny),
                    hsl::DomainError);
  }

  SUBCASE("step tolerance must be positive") {
    CHECK_THROWS_AS(hsl::transport::solve_V(pl.w_plus, pl.phi, pl.tg, 0.0),
                    hsl::DomainError);
  }

  SUBCASE("data must be band-limited") {
    ProfileField spike = hsl::grid::zero_profile(g);
    spike.values[0] = 1.0;
    CHECK_THROWS_AS(hsl::transport::solve_V(spike, pl.phi, pl.tg),
                    hsl::DomainError);
  }

  SUBCASE("comparison requires matching trajectories") {
    auto V = hsl::transport::solve_V(pl.w_plus, pl.phi, pl.tg);
    V.pop_back();
    CHECK_THROWS_AS(hsl::transport::compare_with_hierarchy(V, pl.h,
                                                           pl.params.k),
                    hsl::DomainError);
  }

  SUBCASE("empty trajectories have no norm drift") {
    CHECK_THROWS_AS(hsl::transport::l2_drift({}), hsl::DomainError);
  }
}
