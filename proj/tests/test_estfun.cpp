#include "hsl/estfun.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "hsl/errors.hpp"

using namespace hsl::est;

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

const IdentityRow* find_row(const IdentityReport& rep, const std::string& id,
                            int m, int i, int j, double t) {
  for (const IdentityRow& r : rep.checked) {
    if (r.id != id || r.m != m || r.i != i || r.j != j) continue;
    if (std::isnan(t) != std::isnan(r.t)) continue;
    if (!std::isnan(t) && r.t != t) continue;
    return &r;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("closed forms of h0 and h at anchor points") {
  CHECK(h0_closed(0.7, 1.0) == 0.0);
  CHECK(h0_closed(1.0, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h0_closed(0.5, 4.0) == doctest::Approx(2.0).epsilon(1e-14));
  for (double g : {0.3, 0.6, 1.0}) {
    CHECK(h_closed(g, 1.0) == 1.0 / g);
  }
  CHECK(h_closed(0.5, 4.0) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("closed forms stay continuous across the gamma = 1 branch") {
  const double at_one = h0_closed(1.0, 10.0);
  CHECK(h0_closed(1.0 - 1e-9, 10.0) == doctest::Approx(at_one).epsilon(1e-7));
  CHECK(h0_closed(1.0 + 1e-9, 10.0) == doctest::Approx(at_one).epsilon(1e-7));
  CHECK(h_closed(1.0 - 1e-9, 10.0) ==
        doctest::Approx(h_closed(1.0, 10.0)).epsilon(1e-7));
}

TEST_CASE("closed forms match quadrature of their defining integrals") {
  for (double g : {0.3, 0.6, 1.0}) {
    for (double t : {2.0, 17.5, 400.0}) {
      CHECK(rel_diff(h0_closed(g, t), oracle_h0(g, t, 1e-12)) < 1e-10);
      CHECK(rel_diff(h_closed(g, t), oracle_h(g, t, 1e-12)) < 1e-9);
    }
  }
}

TEST_CASE("first-order cumulative envelope at gamma = 1/2") {
  EstContext ctx(0.5);
  // int_1^4 t^-1/2 (2 - 2 t^-1/2)^1 dt = 4 log 4 - 2
  CHECK(rel_diff(eval_N(ctx, 1, 4.0), 4.0 * std::log(4.0) - 2.0) < 1e-9);
}

TEST_CASE("order zero members collapse to h0 and h exactly") {
  EstContext ctx(0.6);
  for (double t : {1.0, 7.0, 123.0}) {
    CHECK(eval_N(ctx, 0, t) == eval_h0(ctx, t));
    CHECK(eval_Q(ctx, 0, t) == eval_h(ctx, t));
  }
}

TEST_CASE("anchor values at gamma = 3/4, t = 1") {
  EstContext ctx(0.75);
  CHECK(eval_Q(ctx, 0, 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(eval_P(ctx, 0, 1.0) == doctest::Approx(16.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("gamma = 1 endpoint value of Q0") {
  EstContext ctx(1.0);
  CHECK(eval_Q(ctx, 0, 10.0) ==
        doctest::Approx((1.0 + std::log(10.0)) / 10.0).epsilon(1e-13));
}

TEST_CASE("domain contract violations raise errors") {
  CHECK_THROWS_AS(EstContext(0.0), hsl::DomainError);
  CHECK_THROWS_AS(EstContext(-0.2), hsl::DomainError);
  CHECK_THROWS_AS(EstContext(1.5), hsl::DomainError);
  CHECK_THROWS_AS(EstContext(0.5, 0.0), hsl::DomainError);
  CHECK_THROWS_AS(EstContext(0.5, 1e-10, 0.5), hsl::DomainError);
  CHECK_THROWS_AS(EstContext(0.5, 1e-10, 1e8, 0), hsl::DomainError);
  EstContext shallow(0.4);
  CHECK_THROWS_AS(eval_P(shallow, 0, 2.0), hsl::DomainError);
  EstContext half(0.5);
  CHECK_THROWS_AS(eval_R(half, 0, 2.0), hsl::DomainError);
  CHECK_THROWS_AS(eval_P(half, 0, 2.0), hsl::DomainError);
  CHECK_THROWS_AS(eval_N(half, -1, 2.0), hsl::DomainError);
  CHECK_THROWS_AS(eval_N(half, 1, 0.5), hsl::DomainError);
}

TEST_CASE("evaluators agree with the independent oracle stack") {
  for (double g : {0.3, 0.6, 0.75, 1.0}) {
    EstContext ctx(g);
    for (int m : {0, 1, 2, 3}) {
      for (double t : {1.0, 3.7, 42.0, 1000.0}) {
        CHECK(rel_diff(eval_N(ctx, m, t), oracle_N(g, m, t, 1e-11)) < 1e-8);
        CHECK(rel_diff(eval_Q(ctx, m, t), oracle_Q(g, m, t, 1e-11)) < 1e-8);
        if ((m + 2) * g > 1.0) {
          CHECK(rel_diff(eval_P(ctx, m, t), oracle_P(g, m, t, 1e-11)) < 1e-8);
        }
      }
    }
  }
  EstContext c075(0.75), c06(0.6), c1(1.0);
  CHECK(rel_diff(eval_R(c075, 0, 10.0), oracle_R(0.75, 0, 10.0, 1e-8)) < 1e-6);
  CHECK(rel_diff(eval_R(c06, 1, 5.0), oracle_R(0.6, 1, 5.0, 1e-8)) < 1e-6);
  CHECK(rel_diff(eval_R(c1, 2, 100.0), oracle_R(1.0, 2, 100.0, 1e-8)) < 1e-6);
}

TEST_CASE("truncation point and analytic tails are interchangeable") {
  EstContext near(0.6, 1e-10, 50.0, 10);
  CHECK(rel_diff(eval_Q(near, 2, 10.0), oracle_Q(0.6, 2, 10.0, 1e-11)) < 1e-8);
  CHECK(rel_diff(eval_P(near, 1, 10.0), oracle_P(0.6, 1, 10.0, 1e-11)) < 1e-8);
  EstContext log_branch(1.0, 1e-10, 50.0, 10);
  CHECK(rel_diff(eval_Q(log_branch, 2, 10.0), oracle_Q(1.0, 2, 10.0, 1e-11)) <
        1e-8);
  EstContext two_terms(0.6, 1e-10, 1e4, 2);
  CHECK(rel_diff(eval_Q(two_terms, 2, 10.0), oracle_Q(0.6, 2, 10.0, 1e-11)) <
        1e-8);
}

TEST_CASE("monotonicity in t") {
  EstContext ctx(0.6);
  const std::vector<double> ts = {1.0, 2.0, 5.0, 10.0, 50.0, 200.0, 1000.0};
  for (std::size_t k = 1; k < ts.size(); ++k) {
    CHECK(eval_N(ctx, 2, ts[k]) > eval_N(ctx, 2, ts[k - 1]));
    CHECK(eval_Q(ctx, 2, ts[k]) < eval_Q(ctx, 2, ts[k - 1]));
    CHECK(eval_P(ctx, 1, ts[k]) < eval_P(ctx, 1, ts[k - 1]));
    CHECK(eval_R(ctx, 1, ts[k]) < eval_R(ctx, 1, ts[k - 1]));
    CHECK(ts[k] * eval_h(ctx, ts[k]) > ts[k - 1] * eval_h(ctx, ts[k - 1]));
  }
}

TEST_CASE("identity suite passes across representative gammas") {
  const std::vector<double> ts = {1.0, 2.0, 10.0, 100.0};
  const std::vector<std::pair<double, double>> windows = {
      {1.0, 2.0}, {2.0, 10.0}, {10.0, 100.0}};
  for (double g : {0.6, 1.0}) {
    EstContext ctx(g);
    IdentityReport rep = verify_identities(ctx, 2, ts, windows);
    for (const IdentityRow& r : rep.failures()) {
      CAPTURE(r.id);
      CAPTURE(r.gamma);
      CAPTURE(r.m);
      CAPTURE(r.i);
      CAPTURE(r.j);
      CAPTURE(r.t);
      CAPTURE(r.err);
      CHECK(r.pass);
    }
    CHECK(rep.all_pass());
    CHECK(!rep.checked.empty());
  }
}

TEST_CASE("identity suite respects hypothesis gating at small gamma") {
  EstContext ctx(0.3);
  IdentityReport rep =
      verify_identities(ctx, 2, {1.0, 10.0, 100.0}, {{1.0, 10.0}});
  for (const IdentityRow& r : rep.failures()) {
    CAPTURE(r.id);
    CAPTURE(r.m);
    CAPTURE(r.t);
    CAPTURE(r.err);
    CHECK(r.pass);
  }
  CHECK(rep.all_pass());
  // (m+2) gamma > 1 only holds for m = 2 here, so exactly those tail-envelope
  // rows may appear.
  for (const IdentityRow& r : rep.checked) {
    if (r.id == "tail_Q_below_P" || r.id == "R_envelope") CHECK(r.m == 2);
  }
}

TEST_CASE("boundary cases of the inequality suite coincide bitwise") {
  EstContext ctx(0.5);
  IdentityReport rep = verify_identities(ctx, 2, {1.0, 4.0, 100.0},
                                         {{1.0, 4.0}, {4.0, 100.0}},
                                         IdentityKind::Inequalities);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : {1.0, 4.0, 100.0}) {
    const IdentityRow* r = find_row(rep, "head_Q_below_N", 0, -1, -1, t);
    REQUIRE(r != nullptr);
    CHECK(r->err == 0.0);
    r = find_row(rep, "head_hQ_below_N", 1, -1, -1, t);
    REQUIRE(r != nullptr);
    CHECK(r->err == 0.0);
    r = find_row(rep, "N_sandwich_lower", 0, -1, -1, t);
    REQUIRE(r != nullptr);
    CHECK(r->err == 0.0);
    r = find_row(rep, "Q_sandwich_upper", 0, -1, -1, t);
    REQUIRE(r != nullptr);
    CHECK(r->err == 0.0);
    r = find_row(rep, "Q_shift_vs_h", -1, 0, 1, t);
    REQUIRE(r != nullptr);
    CHECK(r->err == 0.0);
  }
  const IdentityRow* w = find_row(rep, "window_NN_convex", -1, 0, 0, nan);
  REQUIRE(w != nullptr);
  CHECK(w->err == 0.0);
  w = find_row(rep, "window_QQ_convex", -1, 0, 1, nan);
  REQUIRE(w != nullptr);
  CHECK(w->err == 0.0);
}

TEST_CASE("row family filter splits the suite") {
  EstContext ctx(0.75);
  const std::vector<double> ts = {1.0, 10.0};
  const std::vector<std::pair<double, double>> windows = {{1.0, 10.0}};
  IdentityReport all = verify_identities(ctx, 1, ts, windows);
  IdentityReport eq =
      verify_identities(ctx, 1, ts, windows, IdentityKind::Equalities);
  IdentityReport in =
      verify_identities(ctx, 1, ts, windows, IdentityKind::Inequalities);
  CHECK(eq.checked.size() + in.checked.size() == all.checked.size());
  for (const IdentityRow& r : eq.checked) CHECK(r.equality);
  for (const IdentityRow& r : in.checked) CHECK(!r.equality);
}

TEST_CASE("suite results are reproducible bit for bit") {
  EstContext ctx(0.6);
  IdentityReport a = verify_identities(ctx, 1, {2.0, 20.0}, {{2.0, 20.0}});
  IdentityReport b = verify_identities(ctx, 1, {2.0, 20.0}, {{2.0, 20.0}});
  REQUIRE(a.checked.size() == b.checked.size());
  for (std::size_t k = 0; k < a.checked.size(); ++k) {
    CHECK(a.checked[k].lhs == b.checked[k].lhs);
    CHECK(a.checked[k].rhs == b.checked[k].rhs);
  }
}
