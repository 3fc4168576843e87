#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrp/kernel.hpp"

namespace lrp {

// Exact quantities for a tiny box, obtained by enumerating every subset of
// the candidate edge set (weights prod p_e prod (1-p_e)). Reference values
// for validating all Monte Carlo estimators.
struct ExactDistribution {
  Box box;
  KernelSpec spec;
  std::vector<double> t;           // P(0 <->_Lambda x), Box indexing
  double mean_k0 = 0.0;            // E|K_0(Lambda)|
  std::vector<double> k0_survival;    // [m] = P(|K_0| >= m), m = 0..|Lambda|
  std::vector<double> kmax_survival;  // [m] = P(|K_max| >= m)
  std::int64_t typical_value = 1;  // M_beta(Lambda), clamped to |Lambda|
  double phi = 0.0;                // sum_x exterior_weight(x,n) t_x
  double phi_second_moment = 0.0;  // E[(sum_x ew(x,n) 1{0<->x})^2]
};

struct EnumerateOptions {
  int max_edges = 24;
};

ExactDistribution enumerate_box(const KernelSpec& spec, const Box& box,
                                const EnumerateOptions& options = {});

double exact_phi(const KernelSpec& spec, const Box& box, const EnumerateOptions& options = {});

// One oracle-vs-Monte-Carlo comparison: the five standard quantities
// estimated from `replicas` samples against their exact values.
struct OracleQuantity {
  std::string name;
  double exact = 0.0;
  double estimate = 0.0;
  double sigma = 0.0;  // exact sampling std error of the estimator
  bool agrees = false; // within 3 sigma (quantile rule for M)
};

struct OracleCheckRun {
  std::vector<OracleQuantity> quantities;
  bool all_agree = true;
};

OracleCheckRun oracle_check_run(const KernelSpec& spec, const Box& box, std::int64_t replicas,
                                std::uint64_t master_seed, unsigned workers = 0);

}  // namespace lrp
