#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lrp/sampler.hpp"

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

TEST_CASE("beta = 0 yields empty configurations") {
  const Box box{3, 1};
  CHECK(sample_naive(spec_d1(0.0), box, {1, 0}).edges.empty());
  CHECK(sample_grouped(spec_d1(0.0), box, {1, 0}).edges.empty());
}

TEST_CASE("samplers are deterministic in (spec, box, seed)") {
  const Box box{4, 1};
  const auto a = sample_grouped(spec_d1(), box, {99, 3});
  const auto b = sample_grouped(spec_d1(), box, {99, 3});
  CHECK(a.edges == b.edges);
  const auto c = sample_grouped(spec_d1(), box, {99, 4});
  CHECK(a.edges != c.edges);

  const auto n1 = sample_naive(spec_d1(), box, {99, 3});
  const auto n2 = sample_naive(spec_d1(), box, {99, 3});
  CHECK(n1.edges == n2.edges);
}

TEST_CASE("configurations are canonical: sorted, in-box, no loops or duplicates") {
  KernelSpec s2;
  s2.d = 2;
  s2.alpha = 0.6;
  s2.beta = 0.8;
  const Box box{3, 2};
  for (std::uint32_t r = 0; r < 20; ++r) {
    const auto config = sample_grouped(s2, box, {5, r});
    std::set<Edge> seen;
    for (const auto& e : config.edges) {
      CHECK(e.a < e.b);
      CHECK(e.a >= 0);
      CHECK(e.b < box.vertex_count());
      CHECK(seen.insert(e).second);
    }
    CHECK(std::is_sorted(config.edges.begin(), config.edges.end()));
  }
}

TEST_CASE("naive pair cap is enforced") {
  NaiveOptions opts;
  opts.pair_cap = 10;
  CHECK_THROWS_AS(sample_naive(spec_d1(), Box{8, 1}, {0, 0}, opts), precondition_error);
}

TEST_CASE("naive edge marginal matches the closed form on Lambda_1") {
  const Box box{1, 1};
  const auto spec = spec_d1();
  const int reps = 100000;
  int open01 = 0;
  for (int r = 0; r < reps; ++r) {
    const auto config = sample_naive(spec, box, {7, static_cast<std::uint32_t>(r)});
    for (const auto& e : config.edges) {
      if (e.a == box.index_of({0}) && e.b == box.index_of({1})) ++open01;
    }
  }
  const double p = 0.63212055882855768;
  const double freq = static_cast<double>(open01) / reps;
  CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("large beta saturates all edges") {
  const Box box{1, 1};
  const auto spec = spec_d1(50.0);
  int all_open = 0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    all_open += sample_grouped(spec, box, {11, static_cast<std::uint32_t>(r)}).edges.size() == 3;
  }
  CHECK(static_cast<double>(all_open) / reps > 0.998);  // exact P ~ 1 - 2e-8
}

TEST_CASE("grouped and naive marginals agree on Lambda_2") {
  const Box box{2, 1};
  const auto spec = spec_d1();
  const std::int64_t v = box.vertex_count();
  const int reps = 100000;
  std::vector<int> cg(static_cast<std::size_t>(v * v), 0), cn(static_cast<std::size_t>(v * v), 0);
  for (int r = 0; r < reps; ++r) {
    for (const auto& e : sample_grouped(spec, box, {42, static_cast<std::uint32_t>(r)}).edges) {
      ++cg[static_cast<std::size_t>(e.a * v + e.b)];
    }
    for (const auto& e : sample_naive(spec, box, {43, static_cast<std::uint32_t>(r)}).edges) {
      ++cn[static_cast<std::size_t>(e.a * v + e.b)];
    }
  }
  for (std::int64_t i = 0; i < v; ++i) {
    for (std::int64_t j = i + 1; j < v; ++j) {
      const double pg = static_cast<double>(cg[static_cast<std::size_t>(i * v + j)]) / reps;
      const double pn = static_cast<double>(cn[static_cast<std::size_t>(i * v + j)]) / reps;
      const double pooled = 0.5 * (pg + pn);
      const double sigma = std::sqrt(std::max(1e-12, 2.0 * pooled * (1 - pooled) / reps));
      CHECK(std::abs(pg - pn) < 3.5 * sigma);
    }
  }
}

TEST_CASE("expected edge count") {
  CHECK(expected_edge_count(spec_d1(0.0), Box{4, 1}) == 0.0);
  CHECK(expected_edge_count(spec_d1(), Box{1, 1}) ==
        doctest::Approx(1.5620526163305558).epsilon(1e-14));
  double prev = 0.0;
  for (int n = 1; n <= 16; n *= 2) {
    const double cur = expected_edge_count(spec_d1(0.5), Box{n, 1});
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("empirical edge count concentrates on the exact expectation") {
  const Box box{8, 1};
  const auto spec = spec_d1(0.5);
  const GroupedSampler sampler(spec, box);
  const double expect = sampler.expected_edge_count();
  const int reps = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double e = static_cast<double>(sampler.sample({3, static_cast<std::uint32_t>(r)}).edges.size());
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  CHECK(std::abs(mean - expect) < 3.0 * std::sqrt(var / reps));
}

TEST_CASE("edge indicators are uncorrelated across distinct edges") {
  const Box box{2, 1};
  const auto spec = spec_d1(0.8, 0.7);
  const int reps = 50000;
  // track two distinct pairs: {0,1} and {1,2} (indices 2-3 and 3-4)
  const std::int64_t a1 = 2, b1 = 3, a2 = 3, b2 = 4;
  int n1 = 0, n2 = 0, n12 = 0;
  for (int r = 0; r < reps; ++r) {
    bool e1 = false, e2 = false;
    for (const auto& e : sample_grouped(spec, box, {77, static_cast<std::uint32_t>(r)}).edges) {
      e1 |= (e.a == a1 && e.b == b1);
      e2 |= (e.a == a2 && e.b == b2);
    }
    n1 += e1;
    n2 += e2;
    n12 += e1 && e2;
  }
  const double p1 = static_cast<double>(n1) / reps;
  const double p2 = static_cast<double>(n2) / reps;
  const double p12 = static_cast<double>(n12) / reps;
  const double cov = p12 - p1 * p2;
  const double sigma = std::sqrt(p1 * (1 - p1) * p2 * (1 - p2) / reps);
  CHECK(std::abs(cov) < 3.0 * sigma);
}

TEST_CASE("text serialization round-trips bit-exactly") {
  KernelSpec s2;
  s2.d = 2;
  s2.alpha = 0.637;
  s2.beta = 1.0 / 3.0;  // not exactly representable in decimal
  s2.amplitude = 0.9999999999999999;
  const Box box{2, 2};
  const auto config = sample_grouped(s2, box, {123456789012345ull, 17});

  std::ostringstream first;
  write_text(config, first);
  std::istringstream in(first.str());
  const auto parsed = read_text(in);

  CHECK(parsed.edges == config.edges);
  CHECK(parsed.box.n == config.box.n);
  CHECK(parsed.box.d == config.box.d);
  CHECK(parsed.spec.beta == config.spec.beta);  // bitwise
  CHECK(parsed.spec.alpha == config.spec.alpha);
  CHECK(parsed.spec.amplitude == config.spec.amplitude);
  CHECK(parsed.seed.master_seed == config.seed.master_seed);
  CHECK(parsed.seed.replica_index == config.seed.replica_index);

  std::ostringstream second;
  write_text(parsed, second);
  CHECK(first.str() == second.str());
}

TEST_CASE("malformed configuration text is rejected") {
  std::istringstream bad1("junk\n");
  CHECK_THROWS_AS(read_text(bad1), config_error);
  std::istringstream bad2(
      "# lrp configuration v1\nd 1\nn 1\nalpha 0.5\nbeta 1\namplitude 1\nnorm sup\n"
      "master_seed 0\nreplica 0\nedges 1\n0 ; 9\n");
  CHECK_THROWS_AS(read_text(bad2), config_error);
}

TEST_CASE("derived seeds differ by tag") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}
