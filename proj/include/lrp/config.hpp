#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lrp/errors.hpp"
#include "lrp/kernel.hpp"

namespace lrp {

// Flat key-value experiment configuration with [section] headers and '#'
// comments. Every run archives its config next to the results, so the
// format favors being diffable and greppable over being terse.
class ParsedConfig {
public:
  static ParsedConfig from_string(const std::string& text);
  static ParsedConfig from_file(const std::string& path);

  const std::string& text() const { return text_; }

  bool has(const std::string& section, const std::string& key) const;

  std::string require_string(const std::string& section, const std::string& key);
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  double require_double(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key, double fallback);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback);
  std::int64_t require_int(const std::string& section, const std::string& key);
  std::uint64_t get_uint64(const std::string& section, const std::string& key,
                           std::uint64_t fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  std::vector<std::int64_t> get_int_list(const std::string& section, const std::string& key,
                                         const std::vector<std::int64_t>& fallback);
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback);

  // every key must have been read by the subcommand; leftovers are typos
  void ensure_all_consumed() const;

  // the [model] section as a KernelSpec; beta_required controls whether a
  // missing beta is an error or defaults to 0
  KernelSpec model(bool beta_required);

private:
  std::string raw(const std::string& section, const std::string& key);
  std::string text_;
  std::map<std::pair<std::string, std::string>, std::string> values_;
  std::set<std::pair<std::string, std::string>> consumed_;
};

std::uint64_t fnv1a64(const std::string& data);
std::string hash_hex(std::uint64_t h);

// exit codes of the experiment harness
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPreconditionError = 3;
inline constexpr int kExitInequalityViolated = 4;
inline constexpr int kExitInternalError = 5;

}  // namespace lrp
