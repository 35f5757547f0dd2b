#pragma once

#include <stdexcept>
#include <string>

namespace brt {

// Invalid user input (config, CLI arguments, data files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankUnsupported : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace brt
