#pragma once

#include <stdexcept>
#include <string>

namespace arl {

/// Invalid configuration: bad values, dimension mismatches, unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse, e.g. stepping a finished episode.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Filesystem failures and malformed or incomplete log/weight files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arl
