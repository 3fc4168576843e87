#pragma once

#include <optional>

#include "lrp/analysis.hpp"
#include "lrp/critical.hpp"

namespace lrp {

// One tail/quantile run per box size: |K_0| per replica plus |K_max|
// quantiles from the same configurations.
SizeSweepEntry run_size_sweep_entry(const KernelSpec& spec, const Box& box,
                                    std::int64_t replicas, std::uint64_t master_seed,
                                    unsigned workers = 0);

struct ExponentsOptions {
  std::vector<int> sizes;                  // dyadic radii, ascending
  std::int64_t replicas_per_size = 2000;
  std::vector<std::int64_t> thresholds;    // dyadic tail thresholds (default 8..n_max/8)
  std::optional<double> beta_low;          // known bracket; otherwise bisect
  std::optional<double> beta_high;
  BetacOptions betac;                      // used when bisecting
  double delta_tolerance = 0.3;
  unsigned workers = 0;
};

struct EndpointReport {
  double beta = 0.0;
  ExponentReport exponents;
  std::vector<SizeSweepEntry> sweep;
  // two-point box-average per size (from the linearity identity)
  std::vector<double> box_average;
  std::vector<double> box_average_se;
  std::vector<double> k0_sum;  // sum_x t_hat = E|K_0(Lambda_n)| estimates
  std::vector<double> k0_sum_se;
  // finite-volume proxy stability: survival at n_max vs n_max/2 moved by
  // less than one combined standard error on the fit window
  bool tail_proxy_stable = true;
};

struct ExponentsResult {
  std::optional<CriticalEstimate> betac;  // present when the pipeline bisected
  double beta_low = 0.0;
  double beta_high = 0.0;
  EndpointReport low;
  EndpointReport high;
  // inequality checks evaluated at the upper endpoint (the beta >= beta_c
  // side, where the sharpness hypotheses hold)
  std::vector<InequalityReport> inequalities;
  bool converged = true;  // false if any fit flagged window drift
};

ExponentsResult run_exponents_pipeline(const KernelSpec& spec_without_beta,
                                       const ExponentsOptions& options,
                                       std::uint64_t master_seed);

std::string exponents_result_json(const ExponentsResult& result, const KernelSpec& spec,
                                  const ExponentsOptions& options, std::uint64_t master_seed);

}  // namespace lrp
