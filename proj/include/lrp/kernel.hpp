#pragma once

#include <string>
#include <vector>

#include "lrp/geometry.hpp"

namespace lrp {

enum class Norm { sup, euclidean };

std::string to_string(Norm n);
Norm norm_from_string(const std::string& s);

// The long-range model: J(x,y) = amplitude * ||x-y||^{-d-alpha}, edges open
// independently with probability 1 - exp(-beta * J(x,y)).
struct KernelSpec {
  int d = 1;
  double alpha = 0.5;
  double beta = 1.0;
  double amplitude = 1.0;
  Norm norm = Norm::sup;

  // basic parameter sanity; throws config_error
  void validate() const;
  // additionally requires beta_c < infinity (d >= 2, or d = 1 with alpha < 1)
  void validate_for_criticality() const;

  KernelSpec with_beta(double b) const {
    KernelSpec s = *this;
    s.beta = b;
    return s;
  }
};

double norm_value(Norm norm, const Point& diff);

// J(x,y); zero when x == y (no self-loops).
double kernel_value(const KernelSpec& spec, const Point& x, const Point& y);

// 1 - exp(-beta * J(x,y))
double connection_probability(const KernelSpec& spec, const Point& x, const Point& y);

// connection probability as a function of sup-distance m >= 1 (sup-norm kernel)
double connection_probability_at_distance(const KernelSpec& spec, double r);

struct ExteriorWeight {
  double value = 0.0;
  double truncation_error = 0.0;  // certified upper bound on |value - exact|
};

struct ExteriorOptions {
  // relative tolerance on the certified truncation error
  double tolerance = 1e-10;
  // pointwise shell cap for the euclidean fallback path
  std::int64_t max_shell = 100000;
};

// Sum over all b outside Lambda_k of the connection probability p(a, b),
// for a inside Lambda_k. Exact decomposition by sup-distance plus an
// exponential-series tail evaluated with Hurwitz zetas (sup-norm kernel);
// the euclidean kernel in d >= 2 falls back to pointwise shell summation
// with a comparison tail bound. Throws precondition_error if the certified
// truncation error exceeds options.tolerance relative to the value.
ExteriorWeight exterior_weight(const KernelSpec& spec, const Point& a, int k,
                               const ExteriorOptions& options = {});

// exterior_weight(x, k) for every x in Lambda_k, indexed by Box{k,d} order.
// d = 1 uses a shared suffix table (O(k) total), higher d loops the scalar.
std::vector<ExteriorWeight> exterior_weight_table(const KernelSpec& spec, int k,
                                                  const ExteriorOptions& options = {});

// d = 1 only: one-sided suffix sums g[L] = sum_{m >= L} p(0, m) for
// L = 1..2*max_k+2, so that exterior_weight(x, k) = g[k+1-x] + g[k+1+x]
// for any k <= max_k. Entry 0 is unused.
std::vector<double> ray_tail_table(const KernelSpec& spec, int max_k);

// E_beta |dLambda_n|: expected number of open edges with exactly one
// endpoint in Lambda_n. Deterministic, no sampling.
ExteriorWeight expected_boundary_edges(const KernelSpec& spec, const Box& box,
                                       const ExteriorOptions& options = {});

namespace detail {
// sum_{m >= L} shell_count_poly(m) * (1 - exp(-c * m^{-p})) with certified
// truncation error; exposed for tests.
ExteriorWeight power_shell_tail(const std::vector<double>& poly, std::int64_t first,
                                double c, double p);
}  // namespace detail

}  // namespace lrp
