#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lrp/numerics.hpp"
#include "lrp/sampler.hpp"

namespace lrp {

// Disjoint-set forest with union by size and path halving. Roots are
// deterministic given the union order.
class UnionFind {
public:
  explicit UnionFind(std::int64_t n) : parent_(n), size_(n, 1) {
    for (std::int64_t i = 0; i < n; ++i) parent_[i] = i;
  }

  std::int64_t find(std::int64_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::int64_t a, std::int64_t b) {
    std::int64_t ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    if (size_[ra] > max_size_) max_size_ = size_[ra];
  }

  std::int64_t component_size(std::int64_t x) { return size_[find(x)]; }
  std::int64_t max_component_size() const { return max_size_; }
  std::int64_t count() const { return static_cast<std::int64_t>(parent_.size()); }

private:
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> size_;
  std::int64_t max_size_ = 1;
};

struct ClusterPartition {
  Box box;
  UnionFind forest;
  std::int64_t origin_index = 0;
};

// Union over all open edges of the configuration.
ClusterPartition build_partition(const Configuration& config);

// |K_0(Lambda_k)|: size of the origin's cluster using only edges with both
// endpoints in Lambda_k. Equals |K_0(Lambda_n)| at k = n.
std::int64_t restricted_cluster_size(const Configuration& config, int k);

std::int64_t largest_cluster_size(ClusterPartition& partition);

// The typical value M_beta(Lambda): smallest m with P(|K_max| >= m) <= 1/e,
// clamped to |Lambda| (the unclamped minimum is |Lambda|+1 when even the
// full box is likely). Estimated from the empirical survival function.
struct QuantileEstimate {
  std::int64_t m_hat = 1;
  std::int64_t replicas = 0;
  double survival_at_m = 0.0;  // empirical P(|K_max| >= m_hat)
  // quantiles recomputed from the Wilson bounds of the survival curve, for
  // downstream checks that want the pessimistic edge
  std::int64_t m_pessimistic_lo = 1;
  std::int64_t m_pessimistic_hi = 1;
  std::string confidence = "wilson-95";
};

struct TypicalValueResult {
  QuantileEstimate estimate;
  // (size, count) pairs of the sampled |K_max| histogram, ascending
  std::vector<std::pair<std::int64_t, std::int64_t>> histogram;
};

// quantile machinery on an already-sampled set of |K_max| values
TypicalValueResult quantile_from_kmax(const std::vector<std::int64_t>& kmax,
                                      std::int64_t vertex_count);

TypicalValueResult estimate_typical_value(const KernelSpec& spec, const Box& box,
                                          std::int64_t replicas, std::uint64_t master_seed,
                                          unsigned workers = 0);

void write_histogram_csv(const TypicalValueResult& result, std::ostream& os);

}  // namespace lrp
