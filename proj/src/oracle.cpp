#include "lrp/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "lrp/clusters.hpp"
#include "lrp/numerics.hpp"
#include "lrp/parallel.hpp"
#include "lrp/sampler.hpp"

namespace lrp {

namespace {

constexpr double kInvE = 0.36787944117144233;

std::int64_t typical_from_survival(const std::vector<double>& survival, std::int64_t vmax) {
  for (std::int64_t m = 1; m < static_cast<std::int64_t>(survival.size()); ++m) {
    if (survival[static_cast<std::size_t>(m)] <= kInvE) return std::min(m, vmax);
  }
  return vmax;
}

}  // namespace

ExactDistribution enumerate_box(const KernelSpec& spec, const Box& box,
                                const EnumerateOptions& options) {
  spec.validate();
  if (box.d != spec.d) throw precondition_error("enumerate_box: dimension mismatch");
  const std::int64_t v = box.vertex_count();

  std::vector<Point> points(static_cast<std::size_t>(v));
  for (std::int64_t i = 0; i < v; ++i) points[static_cast<std::size_t>(i)] = box.point_at(i);

  struct Candidate {
    int a, b;
    double p, q;
  };
  std::vector<Candidate> edges;
  for (std::int64_t i = 0; i < v; ++i) {
    for (std::int64_t j = i + 1; j < v; ++j) {
      const double p = connection_probability(spec, points[static_cast<std::size_t>(i)],
                                              points[static_cast<std::size_t>(j)]);
      if (p > 0.0) {
        edges.push_back({static_cast<int>(i), static_cast<int>(j), p, 1.0 - p});
      }
    }
  }
  if (static_cast<int>(edges.size()) > options.max_edges) {
    throw precondition_error("enumerate_box: candidate edge count exceeds the cap of " +
                             std::to_string(options.max_edges));
  }

  const auto ew = exterior_weight_table(spec, box.n);
  const std::int64_t origin = box.origin_index();

  std::vector<CompensatedSum> t(static_cast<std::size_t>(v));
  std::vector<CompensatedSum> k0_pmf(static_cast<std::size_t>(v) + 1);
  std::vector<CompensatedSum> kmax_pmf(static_cast<std::size_t>(v) + 1);
  CompensatedSum mean_k0, phi, phi2;

  const std::uint64_t subsets = std::uint64_t(1) << edges.size();
  std::vector<std::int64_t> parent(static_cast<std::size_t>(v)), size(static_cast<std::size_t>(v));
  auto find = [&](std::int64_t x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    double prob = 1.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      prob *= (mask >> e) & 1 ? edges[e].p : edges[e].q;
    }
    for (std::int64_t i = 0; i < v; ++i) {
      parent[static_cast<std::size_t>(i)] = i;
      size[static_cast<std::size_t>(i)] = 1;
    }
    std::int64_t kmax = 1;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!((mask >> e) & 1)) continue;
      std::int64_t ra = find(edges[e].a), rb = find(edges[e].b);
      if (ra == rb) continue;
      if (size[static_cast<std::size_t>(ra)] < size[static_cast<std::size_t>(rb)]) std::swap(ra, rb);
      parent[static_cast<std::size_t>(rb)] = ra;
      size[static_cast<std::size_t>(ra)] += size[static_cast<std::size_t>(rb)];
      kmax = std::max(kmax, size[static_cast<std::size_t>(ra)]);
    }
    const std::int64_t root0 = find(origin);
    const std::int64_t k0 = size[static_cast<std::size_t>(root0)];
    double phi_s = 0.0;
    for (std::int64_t x = 0; x < v; ++x) {
      if (find(x) == root0) {
        t[static_cast<std::size_t>(x)].add(prob);
        phi_s += ew[static_cast<std::size_t>(x)].value;
      }
    }
    mean_k0.add(prob * static_cast<double>(k0));
    k0_pmf[static_cast<std::size_t>(k0)].add(prob);
    kmax_pmf[static_cast<std::size_t>(kmax)].add(prob);
    phi.add(prob * phi_s);
    phi2.add(prob * phi_s * phi_s);
  }

  ExactDistribution dist;
  dist.box = box;
  dist.spec = spec;
  dist.t.resize(static_cast<std::size_t>(v));
  for (std::int64_t x = 0; x < v; ++x) dist.t[static_cast<std::size_t>(x)] = t[static_cast<std::size_t>(x)].value();
  dist.mean_k0 = mean_k0.value();
  dist.phi = phi.value();
  dist.phi_second_moment = phi2.value();

  auto survival_from = [&](const std::vector<CompensatedSum>& pmf) {
    std::vector<double> s(static_cast<std::size_t>(v) + 1, 0.0);
    double acc = 0.0;
    for (std::int64_t m = v; m >= 1; --m) {
      acc += pmf[static_cast<std::size_t>(m)].value();
      s[static_cast<std::size_t>(m)] = acc;
    }
    s[0] = 1.0;
    return s;
  };
  dist.k0_survival = survival_from(k0_pmf);
  dist.kmax_survival = survival_from(kmax_pmf);
  dist.typical_value = typical_from_survival(dist.kmax_survival, v);
  return dist;
}

double exact_phi(const KernelSpec& spec, const Box& box, const EnumerateOptions& options) {
  return enumerate_box(spec, box, options).phi;
}

OracleCheckRun oracle_check_run(const KernelSpec& spec, const Box& box, std::int64_t replicas,
                                std::uint64_t master_seed, unsigned workers) {
  if (replicas < 100) throw precondition_error("oracle_check_run: replicas >= 100");
  const auto exact = enumerate_box(spec, box);
  const auto ew = exterior_weight_table(spec, box.n);
  const GroupedSampler sampler(spec, box);
  const std::int64_t v = box.vertex_count();
  const std::int64_t origin = box.origin_index();

  // target vertex for the two-point check: +1 in the first coordinate
  Point unit(spec.d, 0);
  unit[0] = 1;
  const std::int64_t target = box.index_of(unit);

  std::vector<std::int64_t> k0(static_cast<std::size_t>(replicas));
  std::vector<std::int64_t> kmax(static_cast<std::size_t>(replicas));
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(replicas));
  std::vector<double> phi_r(static_cast<std::size_t>(replicas));

  parallel_for(replicas, workers, [&](std::int64_t begin, std::int64_t end, unsigned) {
    for (std::int64_t r = begin; r < end; ++r) {
      auto config = sampler.sample({master_seed, static_cast<std::uint32_t>(r)});
      auto part = build_partition(config);
      const std::int64_t root0 = part.forest.find(origin);
      double phi_s = 0.0;
      std::int64_t sz = 0;
      for (std::int64_t x = 0; x < v; ++x) {
        if (part.forest.find(x) == root0) {
          ++sz;
          phi_s += ew[static_cast<std::size_t>(x)].value;
        }
      }
      k0[static_cast<std::size_t>(r)] = sz;
      kmax[static_cast<std::size_t>(r)] = largest_cluster_size(part);
      hit[static_cast<std::size_t>(r)] = part.forest.find(target) == root0;
      phi_r[static_cast<std::size_t>(r)] = phi_s;
    }
  });

  const double rd = static_cast<double>(replicas);
  OracleCheckRun run;
  auto push = [&](const std::string& name, double exact_value, double estimate, double sigma) {
    OracleQuantity q;
    q.name = name;
    q.exact = exact_value;
    q.estimate = estimate;
    q.sigma = sigma;
    q.agrees = sigma > 0.0 ? std::abs(estimate - exact_value) <= 3.0 * sigma
                           : estimate == exact_value;
    run.quantities.push_back(q);
  };

  // t_1
  std::int64_t hits = 0;
  for (auto h : hit) hits += h;
  const double t1_exact = exact.t[static_cast<std::size_t>(target)];
  push("t_1", t1_exact, static_cast<double>(hits) / rd,
       std::sqrt(std::max(0.0, t1_exact * (1.0 - t1_exact) / rd)));

  // E|K_0|
  double k0_mean = 0.0, k0_m2 = 0.0;
  for (std::int64_t m = 1; m <= v; ++m) {
    const double pm = exact.k0_survival[static_cast<std::size_t>(m)] -
                      (m == v ? 0.0 : exact.k0_survival[static_cast<std::size_t>(m) + 1]);
    k0_mean += pm * static_cast<double>(m);
    k0_m2 += pm * static_cast<double>(m) * static_cast<double>(m);
  }
  double k0_sum = 0.0;
  for (auto s : k0) k0_sum += static_cast<double>(s);
  push("E|K0|", exact.mean_k0, k0_sum / rd,
       std::sqrt(std::max(0.0, (k0_m2 - k0_mean * k0_mean) / rd)));

  // P(|K0| >= 2)
  std::int64_t ge2 = 0;
  for (auto s : k0) ge2 += (s >= 2);
  const double p2 = exact.k0_survival[2];
  push("P(|K0|>=2)", p2, static_cast<double>(ge2) / rd,
       std::sqrt(std::max(0.0, p2 * (1.0 - p2) / rd)));

  // M: quantile agreement rule — identical values, or the defining level
  // e^{-1} within 3 sigma of the exact survival at the flip point
  {
    std::vector<std::int64_t> ge(static_cast<std::size_t>(v) + 2, 0);
    for (auto s : kmax) ++ge[static_cast<std::size_t>(s)];
    for (std::int64_t m = v - 1; m >= 1; --m) ge[static_cast<std::size_t>(m)] += ge[static_cast<std::size_t>(m) + 1];
    std::int64_t m_hat = v;
    for (std::int64_t m = 1; m <= v; ++m) {
      if (static_cast<double>(ge[static_cast<std::size_t>(m)]) / rd <= kInvE) {
        m_hat = std::min(m, v);
        break;
      }
    }
    OracleQuantity q;
    q.name = "M";
    q.exact = static_cast<double>(exact.typical_value);
    q.estimate = static_cast<double>(m_hat);
    const auto survival_sigma = [&](std::int64_t m) {
      const double s = exact.kmax_survival[static_cast<std::size_t>(m)];
      return std::sqrt(std::max(0.0, s * (1.0 - s) / rd));
    };
    if (m_hat == exact.typical_value) {
      q.agrees = true;
      q.sigma = 0.0;
    } else if (m_hat < exact.typical_value) {
      const double s = exact.kmax_survival[static_cast<std::size_t>(m_hat)];
      q.sigma = survival_sigma(m_hat);
      q.agrees = (s - kInvE) <= 3.0 * q.sigma;
    } else {
      const double s = exact.kmax_survival[static_cast<std::size_t>(exact.typical_value)];
      q.sigma = survival_sigma(exact.typical_value);
      q.agrees = (kInvE - s) <= 3.0 * q.sigma;
    }
    run.quantities.push_back(q);
  }

  // phi
  double phi_sum = 0.0;
  for (auto p : phi_r) phi_sum += p;
  push("phi", exact.phi, phi_sum / rd,
       std::sqrt(std::max(0.0, (exact.phi_second_moment - exact.phi * exact.phi) / rd)));

  for (const auto& q : run.quantities) run.all_agree &= q.agrees;
  return run;
}

}  // namespace lrp
