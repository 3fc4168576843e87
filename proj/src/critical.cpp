#include "lrp/critical.hpp"

#include <cmath>

#include "json.hpp"
#include "lrp/clusters.hpp"
#include "lrp/sampler.hpp"

namespace lrp {

double phi_indicator(const KernelSpec& spec, int n, std::int64_t replicas,
                     std::uint64_t master_seed, unsigned workers, double* std_error) {
  const auto profile = phi_profile(spec, n, replicas, master_seed, workers);
  if (std_error) *std_error = profile.min_phi_se;
  return profile.min_phi;
}

double crossing_fraction_indicator(const KernelSpec& spec, int n, double fraction,
                                   std::int64_t replicas, std::uint64_t master_seed,
                                   unsigned workers, double* std_error) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw precondition_error("crossing_fraction_indicator: fraction in (0,1]");
  }
  const Box box{n, spec.d};
  const auto result = estimate_typical_value(spec, box, replicas, master_seed, workers);
  const std::int64_t cut = static_cast<std::int64_t>(
      std::ceil(fraction * static_cast<double>(box.vertex_count())));
  std::int64_t hit = 0;
  for (const auto& [size, count] : result.histogram) {
    if (size >= cut) hit += count;
  }
  const double p = static_cast<double>(hit) / static_cast<double>(replicas);
  if (std_error) {
    *std_error = std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(replicas)));
  }
  return p;
}

namespace {

// adaptive indicator evaluation: double the replica count until the value is
// 2 sigma away from 1 or the cap is hit
BisectStep evaluate_indicator(const KernelSpec& spec, double beta, const BetacOptions& options,
                              int box_n, std::uint64_t master_seed, std::uint32_t stage) {
  BisectStep step;
  step.beta = beta;
  step.box = box_n;
  std::int64_t replicas = options.replicas;
  for (;;) {
    const std::uint64_t seed =
        derive_seed(master_seed, (static_cast<std::uint64_t>(stage) << 32) |
                                     static_cast<std::uint64_t>(replicas & 0xffffffff));
    double se = 0.0;
    const double value =
        phi_indicator(spec.with_beta(beta), box_n, replicas, seed, options.workers, &se);
    step.indicator = value;
    step.sigma = se;
    step.replicas = replicas;
    step.decisive = std::abs(value - 1.0) >= 2.0 * se;
    if (step.decisive || replicas >= options.replicas_cap) return step;
    replicas = std::min(options.replicas_cap, replicas * 2);
  }
}

}  // namespace

CriticalEstimate bisect_beta_c(const KernelSpec& spec_without_beta, const BetacOptions& options,
                               std::uint64_t master_seed) {
  KernelSpec spec = spec_without_beta;
  spec.beta = 0.0;
  spec.validate_for_criticality();
  if (!(options.beta_lo >= 0.0) || !(options.beta_hi > options.beta_lo)) {
    throw precondition_error("bisect_beta_c: need 0 <= beta_lo < beta_hi");
  }
  if (!(options.tolerance > 0.0)) {
    throw precondition_error("bisect_beta_c: tolerance must be > 0");
  }

  CriticalEstimate estimate;
  estimate.replicas = options.replicas;
  estimate.replicas_cap = options.replicas_cap;
  estimate.master_seed = master_seed;
  estimate.boxes_used.push_back(options.n);

  std::uint32_t stage = 0;
  double lo = options.beta_lo;
  double hi = options.beta_hi;

  const BisectStep at_lo = evaluate_indicator(spec, lo, options, options.n, master_seed, stage++);
  estimate.steps.push_back(at_lo);
  if (at_lo.indicator - 1.0 > 3.0 * at_lo.sigma) {
    throw precondition_error("bisect_beta_c: indicator at beta_lo is already above 1");
  }
  const BisectStep at_hi = evaluate_indicator(spec, hi, options, options.n, master_seed, stage++);
  estimate.steps.push_back(at_hi);
  if (1.0 - at_hi.indicator > 3.0 * at_hi.sigma) {
    throw precondition_error("bisect_beta_c: indicator at beta_hi is still below 1");
  }

  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    const BisectStep step = evaluate_indicator(spec, mid, options, options.n, master_seed, stage++);
    estimate.steps.push_back(step);
    if (step.decisive) {
      if (step.indicator < 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    } else {
      // ambiguous even at the replica cap: beta_c is statistically
      // indistinguishable from mid at this resolution; shrink both sides
      lo = 0.5 * (lo + mid);
      hi = 0.5 * (hi + mid);
    }
  }

  if (options.size_stability) {
    const int n2 = 2 * options.n;
    estimate.boxes_used.push_back(n2);
    double widened = 0.0;
    for (int pass = 0; pass < 4; ++pass) {
      const BisectStep lo2 = evaluate_indicator(spec, lo, options, n2, master_seed, stage++);
      estimate.steps.push_back(lo2);
      if (lo2.indicator - 1.0 > 2.0 * lo2.sigma) {
        lo -= options.tolerance;
        widened += options.tolerance;
        if (lo < 0.0) lo = 0.0;
        continue;
      }
      const BisectStep hi2 = evaluate_indicator(spec, hi, options, n2, master_seed, stage++);
      estimate.steps.push_back(hi2);
      if (1.0 - hi2.indicator > 2.0 * hi2.sigma) {
        hi += options.tolerance;
        widened += options.tolerance;
        continue;
      }
      break;
    }
    estimate.drift = widened;
  }

  estimate.beta_low = lo;
  estimate.beta_high = hi;
  return estimate;
}

std::string critical_estimate_json(const CriticalEstimate& estimate) {
  nlohmann::json j;
  j["beta_low"] = estimate.beta_low;
  j["beta_high"] = estimate.beta_high;
  j["indicator"] = estimate.indicator;
  j["boxes_used"] = estimate.boxes_used;
  j["replicas"] = estimate.replicas;
  j["replicas_cap"] = estimate.replicas_cap;
  j["master_seed"] = estimate.master_seed;
  j["drift"] = estimate.drift;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : estimate.steps) {
    j["steps"].push_back({{"beta", s.beta},
                          {"indicator", s.indicator},
                          {"sigma", s.sigma},
                          {"replicas", s.replicas},
                          {"box", s.box},
                          {"decisive", s.decisive}});
  }
  return j.dump(2);
}

}  // namespace lrp
