#include "lrp/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "lrp/parallel.hpp"

namespace lrp {

SizeSweepEntry run_size_sweep_entry(const KernelSpec& spec, const Box& box,
                                    std::int64_t replicas, std::uint64_t master_seed,
                                    unsigned workers) {
  if (replicas < 100) throw precondition_error("run_size_sweep_entry: replicas >= 100");
  const GroupedSampler sampler(spec, box);
  SizeSweepEntry entry;
  entry.sample.box_radius = box.n;
  entry.sample.vertex_count = box.vertex_count();
  entry.sample.k0.resize(static_cast<std::size_t>(replicas));
  std::vector<std::int64_t> kmax(static_cast<std::size_t>(replicas));
  parallel_for(replicas, workers, [&](std::int64_t begin, std::int64_t end, unsigned) {
    for (std::int64_t r = begin; r < end; ++r) {
      auto config = sampler.sample({master_seed, static_cast<std::uint32_t>(r)});
      auto part = build_partition(config);
      entry.sample.k0[static_cast<std::size_t>(r)] =
          part.forest.component_size(part.origin_index);
      kmax[static_cast<std::size_t>(r)] = largest_cluster_size(part);
    }
  });
  entry.typical = quantile_from_kmax(kmax, box.vertex_count()).estimate;
  return entry;
}

namespace {

std::vector<std::int64_t> default_thresholds(int n_max) {
  // dyadic from 4 (below that, discreteness corrections bend the tail); the
  // per-endpoint fit additionally caps thresholds at a quarter of the
  // measured typical largest cluster, beyond which the finite box truncates
  // the survival curve
  std::vector<std::int64_t> ts;
  for (std::int64_t t = 4; t <= n_max; t *= 2) ts.push_back(t);
  return ts;
}

std::vector<std::int64_t> cap_thresholds(const std::vector<std::int64_t>& thresholds,
                                         std::int64_t m_hat) {
  const std::int64_t cap = std::max<std::int64_t>(32, m_hat / 4);
  std::vector<std::int64_t> out;
  for (std::int64_t t : thresholds) {
    if (t <= cap) out.push_back(t);
  }
  return out;
}

EndpointReport run_endpoint(const KernelSpec& spec, double beta, const ExponentsOptions& options,
                            const std::vector<std::int64_t>& thresholds,
                            std::uint64_t master_seed, std::uint64_t tag) {
  EndpointReport ep;
  ep.beta = beta;
  const KernelSpec at = spec.with_beta(beta);

  for (std::size_t i = 0; i < options.sizes.size(); ++i) {
    const Box box{options.sizes[i], spec.d};
    ep.sweep.push_back(run_size_sweep_entry(at, box, options.replicas_per_size,
                                            derive_seed(master_seed, tag * 1000 + i),
                                            options.workers));
    const auto& k0 = ep.sweep.back().sample.k0;
    std::vector<double> k0d(k0.begin(), k0.end());
    const auto ms = mean_and_se(k0d);
    const double v = static_cast<double>(box.vertex_count());
    ep.k0_sum.push_back(ms.mean);
    ep.k0_sum_se.push_back(ms.se);
    ep.box_average.push_back(ms.mean / v);
    ep.box_average_se.push_back(ms.se / v);
  }

  // fits; thresholds above ~M(Lambda_n)/4 are truncation-dominated
  const auto& largest = ep.sweep.back().sample;
  const auto usable_thresholds = cap_thresholds(thresholds, ep.sweep.back().typical.m_hat);
  const auto tail = fit_tail_exponent(largest, usable_thresholds);
  std::vector<std::int64_t> radii(options.sizes.begin(), options.sizes.end());
  const auto twopoint = fit_two_point_exponent(radii, ep.box_average, ep.box_average_se, spec.d);

  auto& rep = ep.exponents;
  rep.theta_hat = tail.theta_hat;
  rep.theta_se = tail.slope_se;
  rep.delta_hat = tail.delta_hat;
  rep.delta_flagged_infinite = tail.delta_flagged_infinite;
  rep.two_eta_hat = twopoint.two_eta_hat;
  rep.two_eta_se = twopoint.slope_se;
  rep.tail_window_lo = tail.thresholds.front();
  rep.tail_window_hi = tail.thresholds.back();
  rep.size_window_lo = options.sizes.size() >= 5 ? options.sizes[2] : options.sizes.front();
  rep.size_window_hi = options.sizes.back();
  rep.lower_bound_delta = delta_lower_bound(spec.d, spec.alpha);
  rep.lower_bound_two_eta = two_eta_lower_bound(spec.alpha);
  rep.conjectured_delta_value = conjectured_delta(spec.d, spec.alpha);
  rep.conjectured_two_eta_value = conjectured_two_eta(spec.d, spec.alpha);
  rep.converged = tail.converged && twopoint.converged;

  // finite-volume proxy stability: on the shared fit window, doubling the
  // box should move each survival estimate by less than one standard error
  if (ep.sweep.size() >= 2) {
    const auto& prev_entry = ep.sweep[ep.sweep.size() - 2];
    const auto usable = cap_thresholds(tail.thresholds, prev_entry.typical.m_hat);
    const auto cur_tail = tail_from_sample(largest, usable);
    const auto prev_tail = tail_from_sample(prev_entry.sample, usable);
    for (std::size_t i = 0; i < usable.size(); ++i) {
      const double diff = std::abs(cur_tail[i].mean - prev_tail[i].mean);
      const double se = std::hypot(cur_tail[i].std_error, prev_tail[i].std_error);
      if (diff > std::max(se, 1e-12)) {
        ep.tail_proxy_stable = false;
        break;
      }
    }
  }
  return ep;
}

}  // namespace

ExponentsResult run_exponents_pipeline(const KernelSpec& spec_without_beta,
                                       const ExponentsOptions& options,
                                       std::uint64_t master_seed) {
  KernelSpec spec = spec_without_beta;
  spec.validate_for_criticality();
  if (options.sizes.size() < 3) {
    throw precondition_error("exponents pipeline: need at least 3 box sizes");
  }
  if (!std::is_sorted(options.sizes.begin(), options.sizes.end())) {
    throw precondition_error("exponents pipeline: sizes must be ascending");
  }

  ExponentsResult result;
  if (options.beta_low && options.beta_high) {
    result.beta_low = *options.beta_low;
    result.beta_high = *options.beta_high;
  } else {
    result.betac = bisect_beta_c(spec, options.betac, derive_seed(master_seed, 0xBC));
    result.beta_low = result.betac->beta_low;
    result.beta_high = result.betac->beta_high;
  }

  const auto thresholds = options.thresholds.empty()
                              ? default_thresholds(options.sizes.back())
                              : options.thresholds;

  result.low = run_endpoint(spec, result.beta_low, options, thresholds, master_seed, 1);
  result.high = run_endpoint(spec, result.beta_high, options, thresholds, master_seed, 2);

  // inequality checks at the upper endpoint
  const auto& hi = result.high;
  std::vector<std::int64_t> radii(options.sizes.begin(), options.sizes.end());
  const auto tail_hi = fit_tail_exponent(
      hi.sweep.back().sample, cap_thresholds(thresholds, hi.sweep.back().typical.m_hat));
  auto props = check_propositions(radii, hi.k0_sum, hi.k0_sum_se, tail_hi, spec.d, spec.alpha,
                                  options.delta_tolerance);
  result.inequalities.insert(result.inequalities.end(), props.begin(), props.end());
  const double theta_hi = tail_hi.theta_hat;
  if (theta_hi > 0.0 && theta_hi < 1.0) {
    result.inequalities.push_back(check_quantile_bound(hi.sweep, theta_hi));
    auto moments = check_moment_bound(hi.sweep, theta_hi, hi.exponents.two_eta_hat, spec.d);
    result.inequalities.insert(result.inequalities.end(), moments.begin(), moments.end());
  }
  if (!hi.exponents.delta_flagged_infinite) {
    result.inequalities.push_back(hyperscaling_consistency(
        hi.exponents.two_eta_hat, hi.exponents.two_eta_se, hi.exponents.delta_hat,
        hi.exponents.theta_se / (hi.exponents.theta_hat * hi.exponents.theta_hat), spec.d));
  }

  result.converged = hi.exponents.converged && result.low.exponents.converged &&
                     hi.tail_proxy_stable;
  return result;
}

namespace {

nlohmann::json exponent_report_json(const ExponentReport& rep) {
  nlohmann::json j;
  j["theta_hat"] = rep.theta_hat;
  j["theta_se"] = rep.theta_se;
  j["delta_hat"] = rep.delta_flagged_infinite ? nlohmann::json("infinity")
                                              : nlohmann::json(rep.delta_hat);
  j["two_eta_hat"] = rep.two_eta_hat;
  j["two_eta_se"] = rep.two_eta_se;
  j["tail_window"] = {rep.tail_window_lo, rep.tail_window_hi};
  j["size_window"] = {rep.size_window_lo, rep.size_window_hi};
  j["lower_bound_delta"] = rep.lower_bound_delta;
  j["lower_bound_two_eta"] = rep.lower_bound_two_eta;
  if (rep.conjectured_delta_value) j["conjectured_delta"] = *rep.conjectured_delta_value;
  if (rep.conjectured_two_eta_value) j["conjectured_two_eta"] = *rep.conjectured_two_eta_value;
  j["converged"] = rep.converged;
  return j;
}

nlohmann::json inequality_json(const InequalityReport& rep) {
  return {{"name", rep.name},       {"lhs", rep.lhs},
          {"rhs", rep.rhs},         {"lhs_se", rep.lhs_se},
          {"rhs_se", rep.rhs_se},   {"tolerance", rep.tolerance},
          {"verdict", rep.verdict}, {"note", rep.note},
          {"informational", rep.informational}};
}

}  // namespace

std::string exponents_result_json(const ExponentsResult& result, const KernelSpec& spec,
                                  const ExponentsOptions& options, std::uint64_t master_seed) {
  nlohmann::json j;
  j["config"] = {{"d", spec.d},
                 {"alpha", spec.alpha},
                 {"amplitude", spec.amplitude},
                 {"norm", to_string(spec.norm)},
                 {"sizes", options.sizes},
                 {"replicas_per_size", options.replicas_per_size}};
  j["beta_bracket"] = {result.beta_low, result.beta_high};
  if (result.betac) {
    j["betac"] = nlohmann::json::parse(critical_estimate_json(*result.betac));
  }
  j["exponent_report"] = {{"at_beta_low", exponent_report_json(result.low.exponents)},
                          {"at_beta_high", exponent_report_json(result.high.exponents)}};
  j["exponent_report"]["tail_proxy_stable"] = result.high.tail_proxy_stable;
  j["exponent_report"]["theta_hypothesis_low"] = hypothesis_theta(result.low.sweep.back().sample);
  j["exponent_report"]["theta_hypothesis_high"] =
      hypothesis_theta(result.high.sweep.back().sample);
  j["inequality_reports"] = nlohmann::json::array();
  for (const auto& rep : result.inequalities) {
    j["inequality_reports"].push_back(inequality_json(rep));
  }
  j["converged"] = result.converged;
  j["provenance"] = {{"master_seed", master_seed},
                     {"replicas_per_size", options.replicas_per_size},
                     {"sizes", options.sizes}};
  return j.dump(2);
}

}  // namespace lrp
