#include <cmath>

#include "doctest.h"
#include "lrp/oracle.hpp"

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

TEST_CASE("enumeration of Lambda_1 reproduces the closed forms") {
  const auto dist = enumerate_box(spec_d1(), Box{1, 1});
  const Box box{1, 1};
  // t_1 = p01 + (1-p01) p0,-1 p-1,1
  CHECK(dist.t[box.index_of({1})] == doctest::Approx(0.70137488301088251).epsilon(1e-14));
  CHECK(dist.t[box.index_of({-1})] == doctest::Approx(0.70137488301088251).epsilon(1e-14));
  CHECK(dist.t[box.index_of({0})] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dist.mean_k0 == doctest::Approx(2.402749766021765).epsilon(1e-14));
  CHECK(dist.mean_k0 == doctest::Approx(1.0 + 2.0 * dist.t[box.index_of({1})]).epsilon(1e-14));
  CHECK(dist.k0_survival[2] == doctest::Approx(0.86466471676338731).epsilon(1e-14));
  CHECK(dist.kmax_survival[2] == doctest::Approx(0.90496912028747747).epsilon(1e-14));
  CHECK(dist.kmax_survival[3] == doctest::Approx(0.53808504925837771).epsilon(1e-14));
  CHECK(dist.typical_value == 3);
  CHECK(dist.phi == doctest::Approx(7.7722929006159114).epsilon(1e-12));
}

TEST_CASE("enumeration at beta = 0") {
  const auto dist = enumerate_box(spec_d1(0.0), Box{1, 1});
  const Box box{1, 1};
  CHECK(dist.t[box.index_of({1})] == 0.0);
  CHECK(dist.mean_k0 == 1.0);
  CHECK(dist.phi == 0.0);
  // survival drops from 1 to 0 at m = 2, so the defining minimum is 2
  CHECK(dist.typical_value == 2);
}

TEST_CASE("oracle linearity: sum of t equals E|K_0|") {
  for (double beta : {0.3, 0.8, 1.7}) {
    const auto dist = enumerate_box(spec_d1(beta, 0.7), Box{2, 1});
    double sum = 0.0;
    for (double t : dist.t) sum += t;
    CHECK(sum == doctest::Approx(dist.mean_k0).epsilon(1e-13));
  }
}

TEST_CASE("exact quantities are monotone in beta") {
  const Box box{2, 1};
  double prev_t = -1.0, prev_k0 = -1.0, prev_phi = -1.0;
  for (double beta : {0.0, 0.2, 0.5, 1.0, 2.0, 4.0}) {
    const auto dist = enumerate_box(spec_d1(beta), box);
    const double t1 = dist.t[box.index_of({1})];
    CHECK(t1 >= prev_t);
    CHECK(dist.mean_k0 >= prev_k0);
    CHECK(dist.phi >= prev_phi);
    prev_t = t1;
    prev_k0 = dist.mean_k0;
    prev_phi = dist.phi;
  }
}

TEST_CASE("exact phi of the single-point box is the exterior weight") {
  const auto spec = spec_d1();
  CHECK(exact_phi(spec, Box{0, 1}) ==
        doctest::Approx(exterior_weight(spec, {0}, 0).value).epsilon(1e-14));
  CHECK(exact_phi(spec_d1(0.0), Box{1, 1}) == 0.0);
}

TEST_CASE("edge cap rejects boxes beyond enumeration reach") {
  KernelSpec s2;
  s2.d = 2;
  s2.alpha = 0.5;
  s2.beta = 1.0;
  CHECK_THROWS_AS(enumerate_box(s2, Box{1, 2}), precondition_error);  // 36 edges
  EnumerateOptions wide;
  wide.max_edges = 10;
  CHECK_NOTHROW(enumerate_box(spec_d1(), Box{2, 1}, wide));  // exactly 10 edges
}

TEST_CASE("oracle check run agrees at 1e5 replicas") {
  const auto run = oracle_check_run(spec_d1(1.0, 0.5), Box{1, 1}, 100000, 2026);
  CHECK(run.quantities.size() == 5);
  for (const auto& q : run.quantities) {
    INFO(q.name, ": exact ", q.exact, " estimate ", q.estimate, " sigma ", q.sigma);
    CHECK(q.agrees);
  }
  CHECK(run.all_agree);
}

TEST_CASE("oracle check run on a second corner of the grid") {
  const auto run = oracle_check_run(spec_d1(2.0, 0.3), Box{1, 1}, 100000, 515);
  CHECK(run.all_agree);
}
