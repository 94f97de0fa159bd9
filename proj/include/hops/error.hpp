#pragma once

#include <stdexcept>
#include <string>

namespace hops {

// All library errors derive from Error and carry a stable module-qualified
// code ("svd.no_convergence", "ingest.duplicate_hour") so callers can report
// failures mechanically.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

struct DimensionError : Error {
  DimensionError(std::string code, const std::string& message)
      : Error(std::move(code), message) {}
};

struct NumericalError : Error {
  NumericalError(std::string code, const std::string& message)
      : Error(std::move(code), message) {}
};

struct DataError : Error {
  DataError(std::string code, const std::string& message)
      : Error(std::move(code), message) {}
};

struct ConfigError : Error {
  ConfigError(std::string code, const std::string& message)
      : Error(std::move(code), message) {}
};

}  // namespace hops
