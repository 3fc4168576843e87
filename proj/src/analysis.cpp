#include "lrp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrp/parallel.hpp"

namespace lrp {

double f_scaling(std::int64_t n, double alpha) {
  if (n < 2) throw precondition_error("f_scaling: requires n >= 2");
  const double nd = static_cast<double>(n);
  if (alpha < 1.0) return std::pow(nd, -alpha);
  if (alpha == 1.0) return std::log(nd) / nd;
  return 1.0 / nd;
}

Rational delta_lower_bound(int d, const Rational& alpha) {
  const Rational one(1);
  const Rational a = std::min(alpha, one);
  if (!(alpha > Rational(0))) throw precondition_error("delta_lower_bound: alpha > 0");
  if (a >= Rational(d)) {
    throw precondition_error("delta_lower_bound: requires alpha ^ 1 < d");
  }
  return (Rational(d) + a) / (Rational(d) - a);
}

double delta_lower_bound(int d, double alpha) {
  if (!(alpha > 0.0)) throw precondition_error("delta_lower_bound: alpha > 0");
  const double a = std::min(alpha, 1.0);
  if (a >= static_cast<double>(d)) {
    throw precondition_error("delta_lower_bound: requires alpha ^ 1 < d");
  }
  return (static_cast<double>(d) + a) / (static_cast<double>(d) - a);
}

double two_eta_lower_bound(double alpha) {
  if (!(alpha > 0.0)) throw precondition_error("two_eta_lower_bound: alpha > 0");
  return std::min(alpha, 1.0);
}

std::optional<double> conjectured_delta(int d, double alpha) {
  if (d == 1) {
    if (alpha >= 1.0) return std::nullopt;  // beta_c infinite
    if (alpha <= 1.0 / 3.0) return 2.0;
    return (1.0 + alpha) / (1.0 - alpha);
  }
  if (d == 2) {
    const double crossover = 43.0 / 24.0;
    if (alpha <= 2.0 / 3.0) return 2.0;
    if (alpha <= crossover) return (2.0 + alpha) / (2.0 - alpha);
    return 91.0 / 5.0;  // short-range value on Z^2
  }
  return std::nullopt;
}

std::optional<double> conjectured_two_eta(int d, double alpha) {
  if (d == 1) {
    if (alpha >= 1.0) return std::nullopt;
    return alpha;
  }
  if (d == 2) {
    const double sr = 43.0 / 24.0;  // 2 - eta_SR with eta_SR = 5/24
    return alpha <= sr ? alpha : sr;
  }
  return std::nullopt;
}

namespace {

struct LogFitData {
  std::vector<double> x, y, y_se;
  std::vector<std::size_t> kept;  // indices into the original arrays
};

LogFitData log_filter(const std::vector<std::int64_t>& abscissae,
                      const std::vector<double>& values, const std::vector<double>& ses,
                      double max_rel_se) {
  LogFitData data;
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (!(values[i] > 0.0)) continue;
    if (ses[i] > max_rel_se * values[i]) continue;
    data.x.push_back(std::log(static_cast<double>(abscissae[i])));
    data.y.push_back(std::log(values[i]));
    data.y_se.push_back(ses[i] / values[i]);
    data.kept.push_back(i);
  }
  return data;
}

bool drift_converged(const LogFitData& data, const LineFit& full) {
  // refit on the upper half of the window; a drifting slope flags
  // non-convergence instead of asserting an exponent
  const std::size_t m = data.x.size();
  const std::size_t half = m - m / 2;
  if (half < 3 || half == m) return true;
  std::vector<double> x(data.x.end() - static_cast<std::ptrdiff_t>(half), data.x.end());
  std::vector<double> y(data.y.end() - static_cast<std::ptrdiff_t>(half), data.y.end());
  std::vector<double> se(data.y_se.end() - static_cast<std::ptrdiff_t>(half), data.y_se.end());
  const auto sub = fit_line(x, y, se);
  const double slack = std::max(0.1, 2.0 * (full.slope_se + sub.slope_se));
  return std::abs(sub.slope - full.slope) <= slack;
}

}  // namespace

TailExponentFit fit_tail_exponent(const std::vector<std::int64_t>& thresholds,
                                  const std::vector<double>& survival,
                                  const std::vector<double>& survival_se) {
  if (thresholds.size() != survival.size() || thresholds.size() != survival_se.size()) {
    throw precondition_error("fit_tail_exponent: size mismatch");
  }
  const auto data = log_filter(thresholds, survival, survival_se, 0.2);
  if (data.x.size() < 4) {
    throw precondition_error(
        "fit_tail_exponent: fewer than 4 usable thresholds (insufficient or non-positive data)");
  }
  const auto fit = fit_line(data.x, data.y, data.y_se);
  TailExponentFit out;
  for (std::size_t i : data.kept) out.thresholds.push_back(thresholds[i]);
  out.slope = fit.slope;
  out.slope_se = fit.slope_se;
  out.theta_hat = -fit.slope;
  if (out.theta_hat < 1e-9) {
    out.delta_flagged_infinite = true;
    out.delta_hat = std::numeric_limits<double>::infinity();
  } else {
    out.delta_hat = 1.0 / out.theta_hat;
  }
  out.converged = drift_converged(data, fit);
  return out;
}

TailExponentFit fit_tail_exponent(const OriginClusterSample& sample,
                                  const std::vector<std::int64_t>& thresholds) {
  const auto estimates = tail_from_sample(sample, thresholds);
  std::vector<double> survival, se;
  for (const auto& e : estimates) {
    survival.push_back(e.mean);
    se.push_back(e.std_error);
  }
  TailExponentFit out = fit_tail_exponent(thresholds, survival, se);

  // jackknife the slope over replicas on the fixed window
  const std::int64_t replicas = static_cast<std::int64_t>(sample.k0.size());
  std::vector<std::int64_t> counts(out.thresholds.size(), 0);
  for (std::size_t i = 0; i < out.thresholds.size(); ++i) {
    for (std::int64_t k0 : sample.k0) counts[i] += (k0 >= out.thresholds[i]);
  }
  std::vector<double> logx(out.thresholds.size());
  for (std::size_t i = 0; i < out.thresholds.size(); ++i) {
    logx[i] = std::log(static_cast<double>(out.thresholds[i]));
  }
  std::vector<double> loo(static_cast<std::size_t>(replicas));
  std::vector<double> y(out.thresholds.size());
  const double rm1 = static_cast<double>(replicas - 1);
  for (std::int64_t r = 0; r < replicas; ++r) {
    const std::int64_t k0 = sample.k0[static_cast<std::size_t>(r)];
    bool ok = true;
    for (std::size_t i = 0; i < out.thresholds.size(); ++i) {
      const std::int64_t c = counts[i] - (k0 >= out.thresholds[i] ? 1 : 0);
      if (c <= 0) {
        ok = false;
        break;
      }
      y[i] = std::log(static_cast<double>(c) / rm1);
    }
    loo[static_cast<std::size_t>(r)] = ok ? fit_line(logx, y).slope : out.slope;
  }
  const double jk = jackknife_se(loo);
  if (jk > 0.0) out.slope_se = jk;
  out.theta_hat = -out.slope;
  return out;
}

TwoPointExponentFit fit_two_point_exponent(const std::vector<std::int64_t>& radii,
                                           const std::vector<double>& box_average,
                                           const std::vector<double>& box_average_se, int d) {
  if (radii.size() != box_average.size() || radii.size() != box_average_se.size()) {
    throw precondition_error("fit_two_point_exponent: size mismatch");
  }
  std::vector<std::int64_t> ns = radii;
  std::vector<double> avg = box_average, se = box_average_se;
  if (ns.size() >= 5) {
    // drop the two smallest sizes (boundary dominated)
    ns.erase(ns.begin(), ns.begin() + 2);
    avg.erase(avg.begin(), avg.begin() + 2);
    se.erase(se.begin(), se.begin() + 2);
  }
  const auto data = log_filter(ns, avg, se, 0.5);
  if (data.x.size() < 3) {
    throw precondition_error("fit_two_point_exponent: insufficient sizes");
  }
  const auto fit = fit_line(data.x, data.y, data.y_se);
  TwoPointExponentFit out;
  out.slope = fit.slope;
  out.slope_se = fit.slope_se;
  out.two_eta_hat = fit.slope + static_cast<double>(d);
  out.converged = drift_converged(data, fit);
  return out;
}

double hypothesis_theta(const OriginClusterSample& sample) {
  const double rd = static_cast<double>(sample.k0.size());
  std::vector<double> logm, logs;
  for (std::int64_t m = 2; m <= sample.vertex_count; m *= 2) {
    CompensatedSum s;
    for (std::int64_t k0 : sample.k0) s.add(static_cast<double>(std::min(k0, m)));
    logm.push_back(std::log(static_cast<double>(m)));
    logs.push_back(std::log(s.value() / rd));
  }
  if (logm.size() < 3) {
    throw precondition_error("hypothesis_theta: box too small for a partial-sum fit");
  }
  // drop the first point (m = 2, discreteness-dominated)
  logm.erase(logm.begin());
  logs.erase(logs.begin());
  const auto fit = fit_line(logm, logs);
  return 1.0 - fit.slope;
}

InequalityReport make_inequality(std::string name, double lhs, double rhs, double lhs_se,
                                 double rhs_se, double tolerance, std::string note) {
  InequalityReport rep;
  rep.name = std::move(name);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.lhs_se = lhs_se;
  rep.rhs_se = rhs_se;
  rep.tolerance = tolerance;
  rep.note = std::move(note);
  const double margin = lhs - (rhs + tolerance);
  const double sigma = std::hypot(lhs_se, rhs_se);
  if (margin <= 0.0) {
    rep.verdict = "holds";
  } else if (margin <= 3.0 * sigma) {
    rep.verdict = "inconclusive";
  } else {
    rep.verdict = "violated";
  }
  return rep;
}

std::vector<InequalityReport> check_universal_tightness(const KernelSpec& spec, const Box& box,
                                                        std::int64_t replicas,
                                                        const std::vector<double>& multipliers,
                                                        std::uint64_t master_seed,
                                                        unsigned workers) {
  for (double a : multipliers) {
    if (a < 1.0) throw precondition_error("check_universal_tightness: multipliers >= 1");
  }
  // M from an independent replica set
  const auto typical =
      estimate_typical_value(spec, box, replicas, derive_seed(master_seed, 0xA11CE), workers);
  const double m_hat = static_cast<double>(typical.estimate.m_hat);

  // check set
  const GroupedSampler sampler(spec, box);
  const std::uint64_t check_seed = derive_seed(master_seed, 0xC0DE);
  std::vector<std::int64_t> kmax(static_cast<std::size_t>(replicas));
  std::vector<std::int64_t> k0(static_cast<std::size_t>(replicas));
  parallel_for(replicas, workers, [&](std::int64_t begin, std::int64_t end, unsigned) {
    for (std::int64_t r = begin; r < end; ++r) {
      auto config = sampler.sample({check_seed, static_cast<std::uint32_t>(r)});
      auto part = build_partition(config);
      kmax[static_cast<std::size_t>(r)] = largest_cluster_size(part);
      k0[static_cast<std::size_t>(r)] = part.forest.component_size(part.origin_index);
    }
  });

  const double rd = static_cast<double>(replicas);
  auto freq_ge = [&](const std::vector<std::int64_t>& xs, double cut) {
    std::int64_t c = 0;
    for (auto x : xs) c += (static_cast<double>(x) >= cut - 1e-9);
    return static_cast<double>(c) / rd;
  };
  auto bin_se = [&](double p) { return std::sqrt(std::max(0.0, p * (1.0 - p) / rd)); };

  const std::string grid_note = "d=" + std::to_string(spec.d) + " alpha=" + std::to_string(spec.alpha) +
                                " beta=" + std::to_string(spec.beta) + " n=" + std::to_string(box.n) +
                                " M=" + std::to_string(typical.estimate.m_hat);
  std::vector<InequalityReport> reports;
  const double p_at_m = freq_ge(k0, m_hat);
  for (double a : multipliers) {
    const double cut = a * m_hat;
    const double right = std::exp(-a / 9.0);

    const double l1 = freq_ge(kmax, cut);
    reports.push_back(make_inequality("largest-cluster-tightness a=" + std::to_string(a), l1,
                                      right, bin_se(l1), 0.0, 0.0, grid_note));

    const double l2 = freq_ge(k0, cut);
    const double r2 = std::exp(1.0) * p_at_m * right;
    reports.push_back(make_inequality("single-cluster-tightness a=" + std::to_string(a), l2, r2,
                                      bin_se(l2), std::exp(1.0) * right * bin_se(p_at_m), 0.0,
                                      grid_note));
  }
  return reports;
}

namespace {

// smallest C >= 1 with sum_{k<=m} P(|K_0| >= k) <= C m^{1-theta} for every
// m up to |Lambda|, across all sizes; the partial sum equals E[min(|K_0|, m)]
double smallest_hypothesis_constant(const std::vector<SizeSweepEntry>& sweep, double theta_hat) {
  double c_hat = 1.0;
  for (const auto& entry : sweep) {
    const std::int64_t v = entry.sample.vertex_count;
    const double rd = static_cast<double>(entry.sample.k0.size());
    std::vector<std::int64_t> hist(static_cast<std::size_t>(v) + 1, 0);
    for (auto s : entry.sample.k0) ++hist[static_cast<std::size_t>(s)];
    double below_sum = 0.0;  // running sum over k < m of k * count(k)
    std::int64_t above = static_cast<std::int64_t>(entry.sample.k0.size());
    for (std::int64_t m = 1; m <= v; ++m) {
      above -= hist[static_cast<std::size_t>(m) - 1];
      below_sum += static_cast<double>(m - 1) * static_cast<double>(hist[static_cast<std::size_t>(m) - 1]);
      const double partial =
          (below_sum + static_cast<double>(m) * static_cast<double>(above)) / rd;
      c_hat = std::max(c_hat, partial / std::pow(static_cast<double>(m), 1.0 - theta_hat));
    }
  }
  return c_hat;
}

void require_hypothesis(double theta_hat, const char* what) {
  if (!(theta_hat > 0.0) || !(theta_hat < 1.0)) {
    throw precondition_error(std::string(what) +
                             ": tail hypothesis not satisfiable on the data (needs theta in (0,1))");
  }
}

}  // namespace

InequalityReport check_quantile_bound(const std::vector<SizeSweepEntry>& sweep,
                                      double theta_hat) {
  if (sweep.empty()) throw precondition_error("check_quantile_bound: empty sweep");
  require_hypothesis(theta_hat, "check_quantile_bound");
  const double c_hat = smallest_hypothesis_constant(sweep, theta_hat);

  // worst size by ratio of the typical value to its bound
  const SizeSweepEntry* worst = nullptr;
  double worst_ratio = -1.0;
  for (const auto& entry : sweep) {
    const double bound =
        3.0 * c_hat *
        std::pow(static_cast<double>(entry.sample.vertex_count), 1.0 / (1.0 + theta_hat));
    const double ratio = static_cast<double>(entry.typical.m_hat) / bound;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = &entry;
    }
  }
  const double bound =
      3.0 * c_hat *
      std::pow(static_cast<double>(worst->sample.vertex_count), 1.0 / (1.0 + theta_hat));
  const double m_se = 0.5 * static_cast<double>(worst->typical.m_pessimistic_hi -
                                                worst->typical.m_pessimistic_lo);
  return make_inequality(
      "max-cluster-quantile-bound", static_cast<double>(worst->typical.m_hat), bound, m_se, 0.0,
      0.0,
      "C_hat=" + std::to_string(c_hat) + " theta_hat=" + std::to_string(theta_hat) +
          " worst |Lambda|=" + std::to_string(worst->sample.vertex_count));
}

std::vector<InequalityReport> check_moment_bound(const std::vector<SizeSweepEntry>& sweep,
                                                 double theta_hat, double two_eta_hat, int d) {
  if (sweep.size() < 3) throw precondition_error("check_moment_bound: insufficient sizes");
  require_hypothesis(theta_hat, "check_moment_bound");
  std::vector<std::int64_t> radii;
  std::vector<double> means, ses;
  for (const auto& entry : sweep) {
    std::vector<double> k0d(entry.sample.k0.begin(), entry.sample.k0.end());
    const auto ms = mean_and_se(k0d);
    radii.push_back(entry.sample.box_radius);
    means.push_back(ms.mean);
    ses.push_back(ms.se);
  }

  std::vector<InequalityReport> reports;

  // primary verdict: the bound with the constants the proof supplies,
  // E|K_0| <= C (1 + e sum_l e^{-l/9}) M^{1-theta} with M <= 3C |Lambda|^{1/(1+theta)}
  const double c_hat = smallest_hypothesis_constant(sweep, theta_hat);
  const double series = std::exp(1.0) / (std::exp(1.0 / 9.0) - 1.0);
  const double c_prime = c_hat * (1.0 + std::exp(1.0) * series);
  std::size_t worst = 0;
  double worst_ratio = -1.0;
  auto bound_at = [&](std::size_t i) {
    return c_prime * std::pow(3.0 * c_hat, 1.0 - theta_hat) *
           std::pow(static_cast<double>(sweep[i].sample.vertex_count),
                    (1.0 - theta_hat) / (1.0 + theta_hat));
  };
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const double ratio = means[i] / bound_at(i);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = i;
    }
  }
  reports.push_back(make_inequality(
      "cluster-moment-bound", means[worst], bound_at(worst), ses[worst], 0.0, 0.0,
      "C_hat=" + std::to_string(c_hat) + " theta_hat=" + std::to_string(theta_hat) +
          " worst |Lambda|=" + std::to_string(sweep[worst].sample.vertex_count)));

  // growth-slope diagnostics; the asymptotic slopes touch the bound at the
  // conjectured sharp exponents, so transient excesses are expected at desk
  // scale and reported without gating
  std::size_t skip = radii.size() >= 5 ? 2 : 0;
  std::vector<std::int64_t> ns(radii.begin() + static_cast<std::ptrdiff_t>(skip), radii.end());
  std::vector<double> ys(means.begin() + static_cast<std::ptrdiff_t>(skip), means.end());
  std::vector<double> ss(ses.begin() + static_cast<std::ptrdiff_t>(skip), ses.end());
  const auto data = log_filter(ns, ys, ss, 0.5);
  if (data.x.size() < 3) throw precondition_error("check_moment_bound: insufficient sizes");
  const auto fit = fit_line(data.x, data.y, data.y_se);
  const double tol = std::max(3.0 * fit.slope_se, 0.05);
  const std::string note = "growth slope of E|K_0(Lambda_n)| over radii, theta_hat=" +
                           std::to_string(theta_hat);
  const double theta_bound =
      static_cast<double>(d) * (1.0 - theta_hat) / (1.0 + theta_hat);
  auto vs_theta = make_inequality("moment-growth-vs-theta", fit.slope, theta_bound,
                                  fit.slope_se, 0.0, tol, note);
  vs_theta.informational = true;
  reports.push_back(std::move(vs_theta));
  auto vs_two_eta = make_inequality("moment-growth-vs-two-eta", fit.slope, two_eta_hat,
                                    fit.slope_se, 0.0, tol, note);
  vs_two_eta.informational = true;
  reports.push_back(std::move(vs_two_eta));
  return reports;
}

std::vector<InequalityReport> check_propositions(const std::vector<std::int64_t>& radii,
                                                 const std::vector<double>& k0_sums,
                                                 const std::vector<double>& k0_sum_ses,
                                                 const TailExponentFit& tail, int d, double alpha,
                                                 double delta_tolerance) {
  std::size_t skip = radii.size() >= 5 ? 2 : 0;
  std::vector<std::int64_t> ns(radii.begin() + static_cast<std::ptrdiff_t>(skip), radii.end());
  std::vector<double> ys(k0_sums.begin() + static_cast<std::ptrdiff_t>(skip), k0_sums.end());
  std::vector<double> ss(k0_sum_ses.begin() + static_cast<std::ptrdiff_t>(skip), k0_sum_ses.end());
  const auto data = log_filter(ns, ys, ss, 0.5);
  if (data.x.size() < 3) throw precondition_error("check_propositions: insufficient sizes");
  const auto fit = fit_line(data.x, data.y, data.y_se);

  std::vector<InequalityReport> reports;
  const double target = std::min(alpha, 1.0);
  const double tol = std::max(3.0 * fit.slope_se, 0.05);
  reports.push_back(make_inequality(
      "two-point-sum-growth", target, fit.slope, 0.0, fit.slope_se, tol,
      "slope of log sum_x t_x vs log n must reach alpha ^ 1 = " + std::to_string(target)));

  const double bound = delta_lower_bound(d, alpha);
  const double delta_se =
      tail.delta_flagged_infinite ? 0.0 : tail.slope_se / (tail.theta_hat * tail.theta_hat);
  reports.push_back(make_inequality(
      "delta-lower-bound", bound, tail.delta_hat, 0.0, delta_se, delta_tolerance,
      "delta_hat from the tail fit against (d+(alpha^1))/(d-(alpha^1))"));
  return reports;
}

InequalityReport hyperscaling_consistency(double two_eta_hat, double two_eta_se,
                                          double delta_hat, double delta_se, int d) {
  const double lhs = two_eta_hat * (delta_hat + 1.0);
  const double rhs = static_cast<double>(d) * (delta_hat - 1.0);
  const double lhs_se = std::hypot(two_eta_se * (delta_hat + 1.0), two_eta_hat * delta_se);
  const double rhs_se = static_cast<double>(d) * delta_se;
  auto rep = make_inequality("hyperscaling-consistency", lhs, rhs, lhs_se, rhs_se, 0.0,
                             "derived consistency line; not a primary check");
  rep.informational = true;
  return rep;
}

}  // namespace lrp
