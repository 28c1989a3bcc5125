#pragma once

#include <stdexcept>
#include <string>

namespace iclgap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset, template, or record files that cannot be read or parsed.
struct LoadError : Error {
  using Error::Error;
};

// Invalid run configuration or CLI input.
struct ConfigError : Error {
  using Error::Error;
};

// Operation called with arguments violating its contract.
struct ArgumentError : Error {
  using Error::Error;
};

}  // namespace iclgap
