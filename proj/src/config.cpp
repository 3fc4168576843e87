#include "lrp/config.hpp"

#include <fstream>
#include <sstream>

namespace lrp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ParsedConfig ParsedConfig::from_string(const std::string& text) {
  ParsedConfig config;
  config.text_ = text;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error("config line " + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    }
    if (!config.values_.emplace(std::make_pair(section, key), value).second) {
      throw config_error("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                         "' in section [" + section + "]");
    }
  }
  return config;
}

ParsedConfig ParsedConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return from_string(buffer.str());
}

bool ParsedConfig::has(const std::string& section, const std::string& key) const {
  return values_.count({section, key}) > 0;
}

std::string ParsedConfig::raw(const std::string& section, const std::string& key) {
  const auto it = values_.find({section, key});
  if (it == values_.end()) {
    throw config_error("missing config key '" + key + "' in section [" + section + "]");
  }
  consumed_.insert(it->first);
  return it->second;
}

std::string ParsedConfig::require_string(const std::string& section, const std::string& key) {
  return raw(section, key);
}

std::string ParsedConfig::get_string(const std::string& section, const std::string& key,
                                     const std::string& fallback) {
  return has(section, key) ? raw(section, key) : fallback;
}

double ParsedConfig::require_double(const std::string& section, const std::string& key) {
  const std::string v = raw(section, key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

double ParsedConfig::get_double(const std::string& section, const std::string& key,
                                double fallback) {
  return has(section, key) ? require_double(section, key) : fallback;
}

std::int64_t ParsedConfig::require_int(const std::string& section, const std::string& key) {
  const std::string v = raw(section, key);
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

std::int64_t ParsedConfig::get_int(const std::string& section, const std::string& key,
                                   std::int64_t fallback) {
  return has(section, key) ? require_int(section, key) : fallback;
}

std::uint64_t ParsedConfig::get_uint64(const std::string& section, const std::string& key,
                                       std::uint64_t fallback) {
  if (!has(section, key)) return fallback;
  const std::string v = raw(section, key);
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': cannot parse '" + v + "' as an unsigned integer");
  }
}

bool ParsedConfig::get_bool(const std::string& section, const std::string& key, bool fallback) {
  if (!has(section, key)) return fallback;
  const std::string v = raw(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::int64_t> ParsedConfig::get_int_list(const std::string& section,
                                                     const std::string& key,
                                                     const std::vector<std::int64_t>& fallback) {
  if (!has(section, key)) return fallback;
  const std::string v = raw(section, key);
  std::istringstream is(v);
  std::vector<std::int64_t> out;
  std::string token;
  while (is >> token) {
    try {
      out.push_back(std::stoll(token));
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': cannot parse '" + token + "' as an integer");
    }
  }
  if (out.empty()) throw config_error("config key '" + key + "': empty list");
  return out;
}

std::vector<double> ParsedConfig::get_double_list(const std::string& section,
                                                  const std::string& key,
                                                  const std::vector<double>& fallback) {
  if (!has(section, key)) return fallback;
  const std::string v = raw(section, key);
  std::istringstream is(v);
  std::vector<double> out;
  std::string token;
  while (is >> token) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': cannot parse '" + token + "' as a number");
    }
  }
  if (out.empty()) throw config_error("config key '" + key + "': empty list");
  return out;
}

void ParsedConfig::ensure_all_consumed() const {
  std::string leftovers;
  for (const auto& [sk, value] : values_) {
    if (consumed_.count(sk)) continue;
    if (!leftovers.empty()) leftovers += ", ";
    leftovers += "[" + sk.first + "] " + sk.second;
  }
  if (!leftovers.empty()) {
    throw config_error("unknown config keys (typo?): " + leftovers);
  }
}

KernelSpec ParsedConfig::model(bool beta_required) {
  KernelSpec spec;
  spec.d = static_cast<int>(require_int("model", "d"));
  spec.alpha = require_double("model", "alpha");
  spec.beta = beta_required ? require_double("model", "beta") : get_double("model", "beta", 0.0);
  spec.amplitude = get_double("model", "amplitude", 1.0);
  spec.norm = norm_from_string(get_string("model", "norm", "sup"));
  spec.validate();
  return spec;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace lrp
