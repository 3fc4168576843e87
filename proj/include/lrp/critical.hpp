#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrp/kernel.hpp"
#include "lrp/observables.hpp"

namespace lrp {

// min_k phi_hat(Lambda_k) over k = 1..n. Values >= 1 indicate beta >= beta_c
// (up to Monte Carlo and finite-size error), values < 1 indicate beta < beta_c.
double phi_indicator(const KernelSpec& spec, int n, std::int64_t replicas,
                     std::uint64_t master_seed, unsigned workers = 0,
                     double* std_error = nullptr);

// Cross-check indicator: P(|K_max(Lambda_n)| >= fraction * |Lambda_n|),
// compared against a fixed level by the caller.
double crossing_fraction_indicator(const KernelSpec& spec, int n, double fraction,
                                   std::int64_t replicas, std::uint64_t master_seed,
                                   unsigned workers = 0, double* std_error = nullptr);

struct BisectStep {
  double beta = 0.0;
  double indicator = 0.0;
  double sigma = 0.0;
  std::int64_t replicas = 0;
  int box = 0;
  bool decisive = false;  // |indicator - 1| >= 2 sigma before the replica cap
};

struct BetacOptions {
  double beta_lo = 0.0;  // initial bracket, indicator < 1 expected here
  double beta_hi = 0.0;  // indicator > 1 expected here
  double tolerance = 0.02;
  int n = 128;
  std::int64_t replicas = 1000;       // initial batch per indicator evaluation
  std::int64_t replicas_cap = 16000;  // adaptive doubling stops here
  bool size_stability = true;         // re-check the bracket at 2n and widen by drift
  unsigned workers = 0;
};

struct CriticalEstimate {
  double beta_low = 0.0;
  double beta_high = 0.0;
  std::string indicator = "phi-criterion";
  std::vector<int> boxes_used;
  std::int64_t replicas = 0;  // initial batch size
  std::int64_t replicas_cap = 0;
  std::uint64_t master_seed = 0;
  double drift = 0.0;  // widening applied by the size-stability pass
  std::vector<BisectStep> steps;
};

// Bisection on the phi indicator. The bracket is reported, never a point
// estimate. Throws config_error for d = 1 with alpha >= 1 (beta_c infinite)
// and precondition_error when the initial endpoints confidently sit on the
// same side of 1.
CriticalEstimate bisect_beta_c(const KernelSpec& spec_without_beta, const BetacOptions& options,
                               std::uint64_t master_seed);

std::string critical_estimate_json(const CriticalEstimate& estimate);

}  // namespace lrp
