#pragma once

#include <stdexcept>
#include <string>

namespace hotdesk {

/// Base for every error raised by the library. Data and runtime failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: unknown ids, malformed config files, bad parameters.
/// The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by the Sinkhorn solver when the iteration produced NaN.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hotdesk
