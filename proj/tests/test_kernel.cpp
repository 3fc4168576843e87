#include <cmath>
#include <vector>

#include "doctest.h"
#include "lrp/errors.hpp"
#include "lrp/kernel.hpp"
#include "lrp/numerics.hpp"
#include "lrp/rng.hpp"

using namespace lrp;

namespace {

KernelSpec spec_d1(double beta = 1.0, double alpha = 0.5) {
  KernelSpec s;
  s.d = 1;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

}  // namespace

TEST_CASE("kernel value on the line") {
  const auto s = spec_d1();
  CHECK(kernel_value(s, {0}, {1}) == doctest::Approx(1.0));
  CHECK(kernel_value(s, {0}, {4}) == doctest::Approx(0.125));
  CHECK(kernel_value(s, {3}, {3}) == 0.0);
}

TEST_CASE("connection probabilities match closed forms") {
  const auto s = spec_d1();
  CHECK(connection_probability(s, {0}, {1}) == doctest::Approx(0.63212055882855768).epsilon(1e-14));
  CHECK(connection_probability(s, {-1}, {1}) == doctest::Approx(0.2978114986734404).epsilon(1e-14));
  const auto s0 = spec_d1(0.0);
  CHECK(connection_probability(s0, {0}, {5}) == 0.0);
  CHECK(connection_probability(s, {2}, {2}) == 0.0);
}

TEST_CASE("connection probability symmetry, translation invariance, beta monotonicity") {
  KernelSpec s;
  s.d = 2;
  s.alpha = 0.8;
  s.beta = 0.6;
  RandomStream rng(11, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    Point x = {static_cast<int>(rng.next_below(41)) - 20, static_cast<int>(rng.next_below(41)) - 20};
    Point y = {static_cast<int>(rng.next_below(41)) - 20, static_cast<int>(rng.next_below(41)) - 20};
    const double pxy = connection_probability(s, x, y);
    CHECK(pxy == connection_probability(s, y, x));
    Point diff = {y[0] - x[0], y[1] - x[1]};
    CHECK(pxy == doctest::Approx(connection_probability(s, {0, 0}, diff)).epsilon(1e-15));
    CHECK(pxy <= connection_probability(s.with_beta(1.7), x, y));
    CHECK(pxy >= 0.0);
    CHECK(pxy <= 1.0);
  }
}

TEST_CASE("spec validation") {
  KernelSpec bad = spec_d1();
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), config_error);
  bad = spec_d1();
  bad.beta = -1.0;
  CHECK_THROWS_AS(bad.validate(), config_error);
  KernelSpec d1a15 = spec_d1(1.0, 1.5);
  CHECK_NOTHROW(d1a15.validate());
  CHECK_THROWS_AS(d1a15.validate_for_criticality(), config_error);
  KernelSpec d2a15;
  d2a15.d = 2;
  d2a15.alpha = 1.5;
  CHECK_NOTHROW(d2a15.validate_for_criticality());
}

TEST_CASE("exterior weight reference values") {
  // beta = 0
  CHECK(exterior_weight(spec_d1(0.0), {0}, 3).value == 0.0);

  // d=1 whole-lattice sum from the origin, 30-digit reference
  const auto w = exterior_weight(spec_d1(), {0}, 0);
  CHECK(w.value == doctest::Approx(4.3038172932471822).epsilon(1e-12));
  CHECK(w.truncation_error < 1e-10 * w.value);

  // d=1 off-center
  const auto w14 = exterior_weight(spec_d1(), {1}, 4);
  CHECK(w14.value == doctest::Approx(1.8907617042935719).epsilon(1e-12));

  // d=2 references (independent decomposition validated by brute force)
  KernelSpec s2;
  s2.d = 2;
  s2.alpha = 0.5;
  s2.beta = 0.7;
  s2.amplitude = 1.3;
  CHECK(exterior_weight(s2, {1, 0}, 2).value == doctest::Approx(9.5589569339943066).epsilon(1e-12));
  KernelSpec s3;
  s3.d = 2;
  s3.alpha = 1.2;
  s3.beta = 0.4;
  CHECK(exterior_weight(s3, {2, -1}, 3).value == doctest::Approx(0.89289124257109650).epsilon(1e-12));
}

TEST_CASE("exterior weight preconditions") {
  CHECK_THROWS_AS(exterior_weight(spec_d1(), {3}, 2), precondition_error);
  CHECK_THROWS_AS(exterior_weight(spec_d1(), {0, 0}, 2), precondition_error);
}

TEST_CASE("exterior weight decays like k^-alpha from the origin") {
  const auto s = spec_d1();
  double lo = 1e300, hi = 0.0;
  for (int k = 4; k <= 4096; k *= 2) {
    const double scaled = exterior_weight(s, {0}, k).value * std::pow(k, s.alpha);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 1.5);  // bounded above and below
  CHECK(hi < 10.0);
}

TEST_CASE("exterior weight is monotone non-increasing in k") {
  const auto s = spec_d1(0.7, 0.8);
  double prev = exterior_weight(s, {2}, 2).value;
  for (int k = 3; k <= 40; ++k) {
    const double cur = exterior_weight(s, {2}, k).value;
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("exterior weight shell-sum consistency") {
  // sum_{b in Lambda_m \ Lambda_k} p(a,b) + ew(a,m) == ew(a,k)
  KernelSpec s2;
  s2.d = 2;
  s2.alpha = 0.7;
  s2.beta = 0.9;
  const Point a = {1, -2};
  const int k = 2, m = 25;
  CompensatedSum between;
  for (int x = -m; x <= m; ++x) {
    for (int y = -m; y <= m; ++y) {
      if (std::max(std::abs(x), std::abs(y)) <= k) continue;
      between.add(connection_probability(s2, a, {x, y}));
    }
  }
  const auto wk = exterior_weight(s2, a, k);
  const auto wm = exterior_weight(s2, a, m);
  CHECK(between.value() + wm.value ==
        doctest::Approx(wk.value).epsilon(1e-11));

  // same identity on the line
  const auto s1 = spec_d1(1.3, 0.6);
  CompensatedSum b1;
  for (int x = -60; x <= 60; ++x) {
    if (std::abs(x) <= 5) continue;
    b1.add(connection_probability(s1, {-3}, {x}));
  }
  CHECK(b1.value() + exterior_weight(s1, {-3}, 60).value ==
        doctest::Approx(exterior_weight(s1, {-3}, 5).value).epsilon(1e-11));
}

TEST_CASE("exterior weight table matches the scalar version") {
  const auto s1 = spec_d1(0.8, 0.7);
  const auto table1 = exterior_weight_table(s1, 6);
  const Box b1{6, 1};
  for (int x = -6; x <= 6; ++x) {
    CHECK(table1[b1.index_of({x})].value ==
          doctest::Approx(exterior_weight(s1, {x}, 6).value).epsilon(1e-12));
  }

  KernelSpec s2;
  s2.d = 2;
  s2.alpha = 1.1;
  s2.beta = 0.5;
  const auto table2 = exterior_weight_table(s2, 2);
  const Box b2{2, 2};
  for (std::int64_t i = 0; i < b2.vertex_count(); ++i) {
    CHECK(table2[i].value ==
          doctest::Approx(exterior_weight(s2, b2.point_at(i), 2).value).epsilon(1e-12));
  }
}

TEST_CASE("expected boundary edges") {
  CHECK(expected_boundary_edges(spec_d1(0.0), Box{5, 1}).value == 0.0);

  // 30-digit reference at n=2
  const auto e2 = expected_boundary_edges(spec_d1(), Box{2, 1});
  CHECK(e2.value == doctest::Approx(13.739988768453145).epsilon(1e-12));

  // brute-force cross-check: pair sum over Lambda_n x (Lambda_m \ Lambda_n) + remainder
  const auto s = spec_d1(0.9, 0.8);
  const int n = 3, m = 400;
  CompensatedSum brute;
  for (int x = -n; x <= n; ++x) {
    for (int y = -m; y <= m; ++y) {
      if (std::abs(y) <= n) continue;
      brute.add(connection_probability(s, {x}, {y}));
    }
    brute.add(exterior_weight(s, {x}, m).value);
  }
  CHECK(expected_boundary_edges(s, Box{n, 1}).value ==
        doctest::Approx(brute.value()).epsilon(1e-11));
}

TEST_CASE("boundary edge scaling crosses over at alpha = 1") {
  // log-log slope over a reduced dyadic range (the acceptance suite runs the
  // full one): d=1, alpha=0.5 -> n^{1-0.5}; alpha=1.5 -> n^0
  std::vector<double> logn, y05, y15;
  for (int n = 16; n <= 1024; n *= 2) {
    logn.push_back(std::log(static_cast<double>(n)));
    y05.push_back(std::log(expected_boundary_edges(spec_d1(1.0, 0.5), Box{n, 1}).value));
    y15.push_back(std::log(expected_boundary_edges(spec_d1(1.0, 1.5), Box{n, 1}).value));
  }
  CHECK(fit_line(logn, y05).slope == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(fit_line(logn, y15).slope) < 0.05);
}

TEST_CASE("euclidean norm: d=1 equals sup, d=2 certifies only loose tolerances") {
  KernelSpec e1 = spec_d1();
  e1.norm = Norm::euclidean;
  CHECK(exterior_weight(e1, {0}, 0).value == doctest::Approx(4.3038172932471822).epsilon(1e-12));

  KernelSpec e2;
  e2.d = 2;
  e2.alpha = 1.4;
  e2.beta = 0.5;
  e2.norm = Norm::euclidean;
  ExteriorOptions loose;
  loose.tolerance = 1e-4;
  const auto w = exterior_weight(e2, {0, 0}, 2, loose);
  CHECK(w.value > 0.0);
  CHECK(w.truncation_error <= 1e-4 * w.value);
  // brute-force lower bound: the certified value dominates any partial sum
  CompensatedSum partial;
  for (int x = -50; x <= 50; ++x) {
    for (int y = -50; y <= 50; ++y) {
      if (std::max(std::abs(x), std::abs(y)) <= 2) continue;
      partial.add(connection_probability(e2, {0, 0}, {x, y}));
    }
  }
  CHECK(w.value >= partial.value());
  CHECK(w.value <= partial.value() + 0.02);  // tail beyond the partial sum is ~1e-2

  ExteriorOptions tight;  // default 1e-10 is not certifiable in d=2 euclidean
  tight.max_shell = 400;
  CHECK_THROWS_AS(exterior_weight(e2, {0, 0}, 2, tight), precondition_error);
}
