#include "lrp/clusters.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "lrp/parallel.hpp"

namespace lrp {

namespace {

void check_edges(const Configuration& config) {
  const std::int64_t v = config.box.vertex_count();
  for (const auto& e : config.edges) {
    if (e.a < 0 || e.b < 0 || e.a >= v || e.b >= v || e.a == e.b) {
      throw precondition_error("cluster build: edge endpoint outside the box");
    }
  }
}

constexpr double kInvE = 0.36787944117144233;

}  // namespace

ClusterPartition build_partition(const Configuration& config) {
  check_edges(config);
  ClusterPartition part{config.box, UnionFind(config.box.vertex_count()),
                        config.box.origin_index()};
  for (const auto& e : config.edges) part.forest.unite(e.a, e.b);
  return part;
}

std::int64_t restricted_cluster_size(const Configuration& config, int k) {
  if (k > config.box.n) {
    throw precondition_error("restricted_cluster_size: k exceeds the box radius");
  }
  check_edges(config);
  UnionFind forest(config.box.vertex_count());
  for (const auto& e : config.edges) {
    if (sup_norm(config.box.point_at(e.a)) <= k && sup_norm(config.box.point_at(e.b)) <= k) {
      forest.unite(e.a, e.b);
    }
  }
  return forest.component_size(config.box.origin_index());
}

std::int64_t largest_cluster_size(ClusterPartition& partition) {
  return partition.forest.max_component_size();
}

TypicalValueResult quantile_from_kmax(const std::vector<std::int64_t>& kmax,
                                      std::int64_t vertex_count) {
  const std::int64_t replicas = static_cast<std::int64_t>(kmax.size());
  if (replicas < 100) {
    throw precondition_error("quantile_from_kmax: needs at least 100 replicas");
  }
  std::map<std::int64_t, std::int64_t> hist;
  for (std::int64_t k : kmax) ++hist[k];

  TypicalValueResult result;
  result.histogram.assign(hist.begin(), hist.end());
  auto& q = result.estimate;
  q.replicas = replicas;

  // survival counts from the top of the histogram down
  const std::int64_t vmax = vertex_count;
  auto quantile = [&](auto survival_ok) {
    std::int64_t ge = replicas;  // # replicas with kmax >= m, starting at m = 1
    std::int64_t m = 1;
    auto it = result.histogram.begin();
    for (;;) {
      if (survival_ok(ge)) return std::min(m, vmax);
      while (it != result.histogram.end() && it->first <= m) {
        ge -= it->second;
        ++it;
      }
      ++m;
      if (m > vmax) return vmax;  // clamp: even the full box is likely
    }
  };

  q.m_hat = quantile([&](std::int64_t ge) {
    return static_cast<double>(ge) / static_cast<double>(replicas) <= kInvE;
  });
  q.m_pessimistic_lo = quantile([&](std::int64_t ge) {
    return wilson_interval(ge, replicas).lo <= kInvE;
  });
  q.m_pessimistic_hi = quantile([&](std::int64_t ge) {
    return wilson_interval(ge, replicas).hi <= kInvE;
  });

  std::int64_t ge_at_m = 0;
  for (const auto& [size, count] : result.histogram) {
    if (size >= q.m_hat) ge_at_m += count;
  }
  q.survival_at_m = static_cast<double>(ge_at_m) / static_cast<double>(replicas);
  return result;
}

TypicalValueResult estimate_typical_value(const KernelSpec& spec, const Box& box,
                                          std::int64_t replicas, std::uint64_t master_seed,
                                          unsigned workers) {
  if (replicas < 100) {
    throw precondition_error("estimate_typical_value: needs at least 100 replicas");
  }
  const GroupedSampler sampler(spec, box);
  std::vector<std::int64_t> kmax(static_cast<std::size_t>(replicas));
  parallel_for(replicas, workers, [&](std::int64_t begin, std::int64_t end, unsigned) {
    for (std::int64_t r = begin; r < end; ++r) {
      auto config = sampler.sample({master_seed, static_cast<std::uint32_t>(r)});
      auto part = build_partition(config);
      kmax[static_cast<std::size_t>(r)] = largest_cluster_size(part);
    }
  });
  return quantile_from_kmax(kmax, box.vertex_count());
}

void write_histogram_csv(const TypicalValueResult& result, std::ostream& os) {
  os << "size,count\n";
  for (const auto& [size, count] : result.histogram) {
    os << size << ',' << count << "\n";
  }
}

}  // namespace lrp
