#pragma once

#include <stdexcept>
#include <string>

namespace rqrc {

/// Invalid or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (proper time, input range, ...).
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// Input vector that cannot be encoded with the configured ranges.
class EncodingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite data (features, CSV files, labels).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical validity check failed (leakage, symplecticity, norm drift).
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace rqrc
