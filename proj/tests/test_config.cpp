#include "doctest.h"
#include "lrp/config.hpp"

using namespace lrp;

namespace {

const char* kSample = R"(# experiment
[model]
d = 1
alpha = 0.5
beta = 0.75   # inline comment
norm = sup

[run]
boxes = 16 32 64
replicas = 1000
master_seed = 42
flag = true
weights = 0.5 1.5
)";

}  // namespace

TEST_CASE("config parsing: sections, comments, typed getters") {
  auto cfg = ParsedConfig::from_string(kSample);
  CHECK(cfg.require_int("model", "d") == 1);
  CHECK(cfg.require_double("model", "alpha") == 0.75 - 0.25);
  CHECK(cfg.require_double("model", "beta") == 0.75);
  CHECK(cfg.get_string("model", "norm", "euclidean") == "sup");
  CHECK(cfg.get_int_list("run", "boxes", {}) == std::vector<std::int64_t>{16, 32, 64});
  CHECK(cfg.get_int("run", "replicas", 0) == 1000);
  CHECK(cfg.get_uint64("run", "master_seed", 0) == 42);
  CHECK(cfg.get_bool("run", "flag", false));
  CHECK(cfg.get_double_list("run", "weights", {}) == std::vector<double>{0.5, 1.5});
  CHECK(cfg.get_int("run", "missing", 7) == 7);
  CHECK_NOTHROW(cfg.ensure_all_consumed());
}

TEST_CASE("config parsing: unknown keys are typos") {
  auto cfg = ParsedConfig::from_string("[model]\nd = 1\nalpha = 0.5\nwat = 1\n");
  CHECK(cfg.require_int("model", "d") == 1);
  CHECK(cfg.require_double("model", "alpha") == 0.5);
  CHECK_THROWS_AS(cfg.ensure_all_consumed(), config_error);
}

TEST_CASE("config parsing: malformed input") {
  CHECK_THROWS_AS(ParsedConfig::from_string("[model\nd = 1\n"), config_error);
  CHECK_THROWS_AS(ParsedConfig::from_string("[model]\nnovalue\n"), config_error);
  CHECK_THROWS_AS(ParsedConfig::from_string("[m]\nk = 1\nk = 2\n"), config_error);
  auto cfg = ParsedConfig::from_string("[model]\nd = notanumber\n");
  CHECK_THROWS_AS(cfg.require_int("model", "d"), config_error);
  CHECK_THROWS_AS(ParsedConfig::from_file("/nonexistent/path.cfg"), config_error);
}

TEST_CASE("model section builds a validated kernel spec") {
  auto cfg = ParsedConfig::from_string("[model]\nd = 2\nalpha = 0.7\nbeta = 0.3\n");
  const auto spec = cfg.model(true);
  CHECK(spec.d == 2);
  CHECK(spec.alpha == 0.7);
  CHECK(spec.beta == 0.3);
  CHECK(spec.amplitude == 1.0);
  CHECK(spec.norm == Norm::sup);

  auto missing_beta = ParsedConfig::from_string("[model]\nd = 1\nalpha = 0.5\n");
  CHECK_THROWS_AS(missing_beta.model(true), config_error);
  auto default_beta = ParsedConfig::from_string("[model]\nd = 1\nalpha = 0.5\n");
  CHECK(default_beta.model(false).beta == 0.0);

  auto invalid = ParsedConfig::from_string("[model]\nd = 0\nalpha = 0.5\nbeta = 1\n");
  CHECK_THROWS_AS(invalid.model(true), config_error);
}

TEST_CASE("content hash is stable and collision-averse") {
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
  CHECK(fnv1a64("abc") != fnv1a64("abd"));
  CHECK(hash_hex(fnv1a64("abc")).size() == 16);
  CHECK(hash_hex(0) == "0000000000000000");
}
