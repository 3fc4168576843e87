// Experiment harness for the long-range percolation laboratory: subcommand
// dispatch, deterministic run manifests, CSV/JSON emission.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrp/analysis.hpp"
#include "lrp/clusters.hpp"
#include "lrp/config.hpp"
#include "lrp/critical.hpp"
#include "lrp/kernel.hpp"
#include "lrp/observables.hpp"
#include "lrp/oracle.hpp"
#include "lrp/pipeline.hpp"
#include "lrp/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunContext {
  lrp::ParsedConfig config;
  std::string subcommand;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;
  fs::path outdir;
  std::vector<std::string> artifacts;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::ofstream open_artifact(const std::string& name) {
    artifacts.push_back(name);
    std::ofstream os(outdir / name);
    os << std::setprecision(17);
    return os;
  }

  void write_manifest() {
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["master_seed"] = master_seed;
    manifest["workers"] = workers;
    manifest["config"] = config.text();
    manifest["artifacts"] = artifacts;
    manifest["tool"] = "lrp";
    manifest["version"] = "1.0.0";
    manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream os(outdir / "manifest.json");
    os << manifest.dump(2) << "\n";
  }
};

int verdict_exit_code(const std::vector<lrp::InequalityReport>& reports) {
  for (const auto& rep : reports) {
    if (rep.verdict == "violated" && !rep.informational) return lrp::kExitInequalityViolated;
  }
  return lrp::kExitOk;
}

json inequality_json(const lrp::InequalityReport& rep) {
  return {{"name", rep.name},       {"lhs", rep.lhs},
          {"rhs", rep.rhs},         {"lhs_se", rep.lhs_se},
          {"rhs_se", rep.rhs_se},   {"tolerance", rep.tolerance},
          {"verdict", rep.verdict}, {"note", rep.note},
          {"informational", rep.informational}};
}

int run_sample(RunContext& ctx) {
  auto spec = ctx.config.model(true);
  const int n = static_cast<int>(ctx.config.require_int("run", "box"));
  const auto sampler_kind = ctx.config.get_string("sample", "sampler", "grouped");
  const auto replica = static_cast<std::uint32_t>(ctx.config.get_int("sample", "replica", 0));
  ctx.config.ensure_all_consumed();

  const lrp::Box box{n, spec.d};
  lrp::Configuration config;
  if (sampler_kind == "grouped") {
    config = lrp::sample_grouped(spec, box, {ctx.master_seed, replica});
  } else if (sampler_kind == "naive") {
    config = lrp::sample_naive(spec, box, {ctx.master_seed, replica});
  } else {
    throw lrp::config_error("unknown sampler '" + sampler_kind + "'");
  }
  auto os = ctx.open_artifact("configuration.txt");
  lrp::write_text(config, os);
  return lrp::kExitOk;
}

int run_twopoint(RunContext& ctx) {
  auto spec = ctx.config.model(true);
  const int n = static_cast<int>(ctx.config.require_int("run", "box"));
  const auto replicas = ctx.config.get_int("run", "replicas", 10000);
  ctx.config.ensure_all_consumed();

  const auto table =
      lrp::estimate_two_point(spec, {n, spec.d}, replicas, ctx.master_seed, ctx.workers);
  auto os = ctx.open_artifact("twopoint.csv");
  lrp::write_two_point_csv(table, os);
  auto summary = ctx.open_artifact("summary.json");
  summary << json({{"sum_t", table.sum},
                   {"sum_t_se", table.sum_se},
                   {"box_average", table.box_average},
                   {"box_average_se", table.box_average_se},
                   {"replicas", table.replicas}})
                 .dump(2)
          << "\n";
  return lrp::kExitOk;
}

int run_tail(RunContext& ctx) {
  auto spec = ctx.config.model(true);
  const auto boxes = ctx.config.get_int_list("run", "boxes", {});
  const auto replicas = ctx.config.get_int("run", "replicas", 10000);
  std::vector<std::int64_t> fallback;
  const lrp::Box smallest{static_cast<int>(boxes.front()), spec.d};
  for (std::int64_t t = 1; t <= smallest.vertex_count(); t *= 2) fallback.push_back(t);
  const auto thresholds = ctx.config.get_int_list("tail", "thresholds", fallback);
  ctx.config.ensure_all_consumed();

  auto os = ctx.open_artifact("tail.csv");
  os << "n,threshold,survival,std_error\n";
  for (std::int64_t n : boxes) {
    const lrp::Box box{static_cast<int>(n), spec.d};
    const auto sample = lrp::run_origin_cluster_sample(
        spec, box, replicas, lrp::derive_seed(ctx.master_seed, static_cast<std::uint64_t>(n)),
        ctx.workers);
    std::vector<std::int64_t> usable;
    for (auto t : thresholds) {
      if (t <= box.vertex_count()) usable.push_back(t);
    }
    for (const auto& [t, est] : [&] {
           std::vector<std::pair<std::int64_t, lrp::ObservableEstimate>> rows;
           auto ests = lrp::tail_from_sample(sample, usable);
           for (std::size_t i = 0; i < usable.size(); ++i) rows.emplace_back(usable[i], ests[i]);
           return rows;
         }()) {
      os << n << ',' << t << ',' << est.mean << ',' << est.std_error << "\n";
    }
  }
  return lrp::kExitOk;
}

int run_phi_scan(RunContext& ctx) {
  auto spec = ctx.config.model(true);
  const int n = static_cast<int>(ctx.config.require_int("run", "box"));
  const auto replicas = ctx.config.get_int("run", "replicas", 4000);
  ctx.config.ensure_all_consumed();

  const auto profile = lrp::phi_profile(spec, n, replicas, ctx.master_seed, ctx.workers);
  auto os = ctx.open_artifact("phi.csv");
  lrp::write_phi_csv(profile, os);
  auto summary = ctx.open_artifact("summary.json");
  summary << json({{"min_phi", profile.min_phi},
                   {"min_phi_se", profile.min_phi_se},
                   {"argmin_k", profile.argmin_k},
                   {"avg_phi", profile.avg_phi},
                   {"avg_phi_se", profile.avg_phi_se},
                   {"replicas", profile.replicas}})
                 .dump(2)
          << "\n";
  return lrp::kExitOk;
}

int run_betac(RunContext& ctx) {
  auto spec = ctx.config.model(false);
  spec.validate_for_criticality();
  lrp::BetacOptions options;
  options.beta_lo = ctx.config.require_double("betac", "beta_low");
  options.beta_hi = ctx.config.require_double("betac", "beta_high");
  options.tolerance = ctx.config.get_double("betac", "tolerance", 0.02);
  options.n = static_cast<int>(ctx.config.get_int("betac", "box", 128));
  options.replicas = ctx.config.get_int("run", "replicas", 1000);
  options.replicas_cap = ctx.config.get_int("betac", "replicas_cap", 16000);
  options.size_stability = ctx.config.get_bool("betac", "size_stability", true);
  options.workers = ctx.workers;
  ctx.config.ensure_all_consumed();

  const auto estimate = lrp::bisect_beta_c(spec, options, ctx.master_seed);
  auto os = ctx.open_artifact("betac.json");
  os << lrp::critical_estimate_json(estimate) << "\n";
  return lrp::kExitOk;
}

int run_isoperimetry(RunContext& ctx) {
  auto spec = ctx.config.model(true);
  const auto boxes = ctx.config.get_int_list("run", "boxes", {});
  ctx.config.ensure_all_consumed();

  auto os = ctx.open_artifact("isoperimetry.csv");
  os << "n,expected_boundary_edges,truncation_error\n";
  std::vector<double> logn, logv, corrected;
  for (std::int64_t n : boxes) {
    const auto value = lrp::expected_boundary_edges(spec, {static_cast<int>(n), spec.d});
    os << n << ',' << value.value << ',' << value.truncation_error << "\n";
    if (n >= 2 && value.value > 0.0) {
      logn.push_back(std::log(static_cast<double>(n)));
      logv.push_back(std::log(value.value));
      corrected.push_back(std::log(value.value / std::log(static_cast<double>(n))));
    }
  }
  auto summary = ctx.open_artifact("summary.json");
  json j;
  if (logn.size() >= 2) {
    j["slope_log_boundary"] = lrp::fit_line(logn, logv).slope;
    j["slope_log_boundary_per_logn"] = lrp::fit_line(logn, corrected).slope;
  }
  j["beta"] = spec.beta;
  j["alpha"] = spec.alpha;
  summary << j.dump(2) << "\n";
  return lrp::kExitOk;
}

int run_exponents(RunContext& ctx) {
  auto spec = ctx.config.model(false);
  spec.validate_for_criticality();
  lrp::ExponentsOptions options;
  for (auto n : ctx.config.get_int_list("run", "boxes", {})) {
    options.sizes.push_back(static_cast<int>(n));
  }
  options.replicas_per_size = ctx.config.get_int("run", "replicas", 2000);
  if (ctx.config.has("tail", "thresholds")) {
    options.thresholds = ctx.config.get_int_list("tail", "thresholds", {});
  }
  if (ctx.config.has("exponents", "beta_low") && ctx.config.has("exponents", "beta_high")) {
    options.beta_low = ctx.config.require_double("exponents", "beta_low");
    options.beta_high = ctx.config.require_double("exponents", "beta_high");
  } else {
    options.betac.beta_lo = ctx.config.require_double("betac", "beta_low");
    options.betac.beta_hi = ctx.config.require_double("betac", "beta_high");
    options.betac.tolerance = ctx.config.get_double("betac", "tolerance", 0.02);
    options.betac.n = static_cast<int>(ctx.config.get_int("betac", "box", 128));
    options.betac.replicas = ctx.config.get_int("betac", "replicas", 1000);
    options.betac.replicas_cap = ctx.config.get_int("betac", "replicas_cap", 16000);
    options.betac.size_stability = ctx.config.get_bool("betac", "size_stability", true);
    options.betac.workers = ctx.workers;
  }
  options.delta_tolerance = ctx.config.get_double("exponents", "delta_tolerance", 0.3);
  options.workers = ctx.workers;
  ctx.config.ensure_all_consumed();

  const auto result = lrp::run_exponents_pipeline(spec, options, ctx.master_seed);

  auto report = ctx.open_artifact("report.json");
  report << lrp::exponents_result_json(result, spec, options, ctx.master_seed) << "\n";

  auto sizes_csv = ctx.open_artifact("sizes.csv");
  sizes_csv << "n,mean_k0_low,se_low,mean_k0_high,se_high\n";
  for (std::size_t i = 0; i < options.sizes.size(); ++i) {
    sizes_csv << options.sizes[i] << ',' << result.low.k0_sum[i] << ',' << result.low.k0_sum_se[i]
              << ',' << result.high.k0_sum[i] << ',' << result.high.k0_sum_se[i] << "\n";
  }

  auto tail_csv = ctx.open_artifact("tail.csv");
  tail_csv << "threshold,survival_low,se_low,survival_high,se_high\n";
  {
    const auto& low_sample = result.low.sweep.back().sample;
    const auto& high_sample = result.high.sweep.back().sample;
    std::vector<std::int64_t> ts;
    for (std::int64_t t = 1; t <= low_sample.vertex_count; t *= 2) ts.push_back(t);
    const auto lo = lrp::tail_from_sample(low_sample, ts);
    const auto hi = lrp::tail_from_sample(high_sample, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      tail_csv << ts[i] << ',' << lo[i].mean << ',' << lo[i].std_error << ',' << hi[i].mean << ','
               << hi[i].std_error << "\n";
    }
  }
  return verdict_exit_code(result.inequalities);
}

int run_tightness(RunContext& ctx) {
  auto spec = ctx.config.model(true);
  const int n = static_cast<int>(ctx.config.require_int("run", "box"));
  const auto replicas = ctx.config.get_int("run", "replicas", 10000);
  const auto multipliers =
      ctx.config.get_double_list("tightness", "multipliers", {1.0, 2.0, 4.0, 8.0});
  ctx.config.ensure_all_consumed();

  const auto reports = lrp::check_universal_tightness(spec, {n, spec.d}, replicas, multipliers,
                                                      ctx.master_seed, ctx.workers);
  auto os = ctx.open_artifact("tightness.json");
  json j = json::array();
  for (const auto& rep : reports) j.push_back(inequality_json(rep));
  os << j.dump(2) << "\n";

  // |K_max| histogram of the quantile replica set (same derived seed as the
  // check, so the values match the reported M)
  const auto typical = lrp::estimate_typical_value(
      spec, {n, spec.d}, replicas, lrp::derive_seed(ctx.master_seed, 0xA11CE), ctx.workers);
  auto hist = ctx.open_artifact("kmax_histogram.csv");
  lrp::write_histogram_csv(typical, hist);
  return verdict_exit_code(reports);
}

int run_oracle_check(RunContext& ctx) {
  const int d = static_cast<int>(ctx.config.get_int("model", "d", 1));
  const double amplitude = ctx.config.get_double("model", "amplitude", 1.0);
  const auto betas = ctx.config.get_double_list("oracle-check", "betas", {0.5, 1.0, 2.0});
  const auto alphas = ctx.config.get_double_list("oracle-check", "alphas", {0.3, 0.5, 0.8});
  const auto seeds = ctx.config.get_int("oracle-check", "seeds", 100);
  const auto replicas = ctx.config.get_int("run", "replicas", 100000);
  const int n = static_cast<int>(ctx.config.get_int("run", "box", 1));
  ctx.config.ensure_all_consumed();

  auto os = ctx.open_artifact("oracle_check.csv");
  os << "alpha,beta,seed_index,quantity,exact,estimate,sigma,agrees\n";
  std::int64_t total = 0, agreeing = 0;
  for (double alpha : alphas) {
    for (double beta : betas) {
      lrp::KernelSpec spec;
      spec.d = d;
      spec.alpha = alpha;
      spec.beta = beta;
      spec.amplitude = amplitude;
      for (std::int64_t s = 0; s < seeds; ++s) {
        const auto run = lrp::oracle_check_run(
            spec, {n, d}, replicas,
            lrp::derive_seed(ctx.master_seed, static_cast<std::uint64_t>(s)), ctx.workers);
        for (const auto& q : run.quantities) {
          os << alpha << ',' << beta << ',' << s << ',' << q.name << ',' << q.exact << ','
             << q.estimate << ',' << q.sigma << ',' << (q.agrees ? 1 : 0) << "\n";
          ++total;
          agreeing += q.agrees;
        }
      }
    }
  }
  const double rate = static_cast<double>(agreeing) / static_cast<double>(total);
  auto summary = ctx.open_artifact("summary.json");
  summary << json({{"comparisons", total},
                   {"agreeing", agreeing},
                   {"agreement_rate", rate},
                   {"pass_threshold", 0.99}})
                 .dump(2)
          << "\n";
  std::cerr << "oracle-check agreement rate: " << rate << "\n";
  return rate >= 0.99 ? lrp::kExitOk : lrp::kExitInequalityViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"long-range percolation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  unsigned workers_override = 0;
  bool workers_given = false;

  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--seed", seed_override, "override [run] master_seed")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--workers", workers_override, "override [run] workers")
      ->each([&](const std::string&) { workers_given = true; });
  app.add_option("--out", out_override, "override [run] out directory");

  const std::vector<std::pair<std::string, int (*)(RunContext&)>> subcommands = {
      {"sample", run_sample},       {"twopoint", run_twopoint},
      {"tail", run_tail},           {"phi-scan", run_phi_scan},
      {"betac", run_betac},         {"isoperimetry", run_isoperimetry},
      {"exponents", run_exponents}, {"tightness", run_tightness},
      {"oracle-check", run_oracle_check}};
  for (const auto& [name, fn] : subcommands) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lrp::kExitConfigError;
  }

  try {
    RunContext ctx;
    ctx.config = lrp::ParsedConfig::from_file(config_path);
    ctx.subcommand = app.get_subcommands().front()->get_name();
    ctx.master_seed = seed_given ? seed_override : ctx.config.get_uint64("run", "master_seed", 0);
    ctx.workers = workers_given
                      ? workers_override
                      : static_cast<unsigned>(ctx.config.get_int("run", "workers", 0));
    const std::string config_out = ctx.config.get_string("run", "out", "runs");
    const std::string out_root = !out_override.empty() ? out_override : config_out;
    const std::uint64_t run_hash = lrp::fnv1a64(ctx.config.text() + "\n" +
                                                std::to_string(ctx.master_seed) + "\n" +
                                                ctx.subcommand);
    ctx.outdir = fs::path(out_root) / (ctx.subcommand + "-" + lrp::hash_hex(run_hash));
    fs::create_directories(ctx.outdir);
    std::cerr << "writing results to " << ctx.outdir.string() << "\n";

    int code = lrp::kExitInternalError;
    for (const auto& [name, fn] : subcommands) {
      if (name == ctx.subcommand) {
        code = fn(ctx);
        break;
      }
    }
    ctx.write_manifest();
    return code;
  } catch (const lrp::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lrp::kExitConfigError;
  } catch (const lrp::precondition_error& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return lrp::kExitPreconditionError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return lrp::kExitInternalError;
  }
}
