#pragma once

#include <stdexcept>
#include <string>

namespace mrsl {

/// Precondition violated by a caller (coincident points, non-positive distance, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An anchor produced no samples inside the aggregation window.
class StaleDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The RSSI gradient vanished, so no bearing can be extracted.
class UndefinedDoaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. The message starts with the offending key path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::invalid_argument(key_path + ": " + what), key_path_(key_path) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace mrsl
