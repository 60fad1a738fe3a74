#pragma once

#include <stdexcept>
#include <string>

namespace srhc {

/// Non-finite input data or a failed numerical kernel (singular step matrix,
/// ill-conditioned reduced system).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent run configuration. `line` is 0 when the error is
/// not tied to a specific input line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace srhc
