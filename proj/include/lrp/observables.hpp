#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lrp/clusters.hpp"
#include "lrp/kernel.hpp"
#include "lrp/sampler.hpp"

namespace lrp {

struct ObservableEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t replicas = 0;
  std::string definition;
};

// Raw per-replica |K_0(Lambda_n)| values; the tail and moment estimators as
// well as the exponent fits post-process this.
struct OriginClusterSample {
  int box_radius = 0;
  std::int64_t vertex_count = 0;
  std::vector<std::int64_t> k0;
};

OriginClusterSample run_origin_cluster_sample(const KernelSpec& spec, const Box& box,
                                              std::int64_t replicas, std::uint64_t master_seed,
                                              unsigned workers = 0);

// Empirical survival P(|K_0(Lambda_n)| >= t) at the given thresholds
// (finite-volume proxy for the cluster-size tail).
std::vector<ObservableEstimate> estimate_tail(const KernelSpec& spec, const Box& box,
                                              const std::vector<std::int64_t>& thresholds,
                                              std::int64_t replicas, std::uint64_t master_seed,
                                              unsigned workers = 0);

std::vector<ObservableEstimate> tail_from_sample(const OriginClusterSample& sample,
                                                 const std::vector<std::int64_t>& thresholds);

// Per-vertex connection frequencies to the origin within Lambda_n.
struct TwoPointTable {
  Box box;
  std::int64_t replicas = 0;
  std::vector<double> t_hat;  // indexed by Box linearization
  std::vector<double> se;
  double sum = 0.0;      // sum_x t_hat = estimate of E|K_0(Lambda_n)|
  double sum_se = 0.0;
  double box_average = 0.0;  // sum / |Lambda_n|
  double box_average_se = 0.0;
};

TwoPointTable estimate_two_point(const KernelSpec& spec, const Box& box, std::int64_t replicas,
                                 std::uint64_t master_seed, unsigned workers = 0);

void write_two_point_csv(const TwoPointTable& table, std::ostream& os);

// Number of open edges {a,b} with a in Lambda_k, b outside (within the
// sampled box), whose inner endpoint is connected to the origin inside
// Lambda_k. Requires k < box radius.
std::int64_t compute_Xk(const Configuration& config, int k);

// phi_beta(Lambda_k) = sum_{x in Lambda_k} exterior_weight(x,k) * t_x with
// t_x = P(0 <-> x within Lambda_k). The exterior sum is exact; only the
// connectivity indicator is sampled.
ObservableEstimate estimate_phi(const KernelSpec& spec, int k, const Box& interior_box,
                                std::int64_t replicas, std::uint64_t master_seed,
                                unsigned workers = 0);

struct PhiPoint {
  int k = 0;
  double phi_hat = 0.0;
  double std_error = 0.0;
};

struct PhiProfile {
  std::vector<PhiPoint> points;  // k = 1..n
  double min_phi = 0.0;          // min_k phi_hat
  double min_phi_se = 0.0;       // jackknife error of the min
  int argmin_k = 0;
  double avg_phi = 0.0;  // (1/n) sum_k phi_hat
  double avg_phi_se = 0.0;
  std::int64_t replicas = 0;
};

// phi estimates for every k = 1..n from one replica set on Lambda_n,
// restricting each configuration to the sub-boxes.
PhiProfile phi_profile(const KernelSpec& spec, int n, std::int64_t replicas,
                       std::uint64_t master_seed, unsigned workers = 0);

void write_phi_csv(const PhiProfile& profile, std::ostream& os);

}  // namespace lrp
