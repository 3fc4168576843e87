#pragma once

#include <stdexcept>
#include <string>

namespace lrp {

// Invalid experiment configuration (bad parameter combination, unparsable
// config file). CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A module precondition was violated at call time (k > n, too few replicas,
// bracket endpoints on the same side, ...). CLI maps this to exit code 3.
class precondition_error : public std::runtime_error {
public:
  explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lrp
