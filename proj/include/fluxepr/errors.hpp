#pragma once

#include <stdexcept>
#include <string>

namespace fluxepr {

// malformed or schema-violating run configuration (CLI exit code 2)
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// insufficient, degenerate, or unidentifiable analysis input (CLI exit code 4)
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fluxepr
