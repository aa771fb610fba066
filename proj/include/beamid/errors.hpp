#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace beamid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array shapes or grids that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Coefficients that violate the admissibility bounds.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Time stepping produced non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Factorization failure that cannot happen for admissible data.
class InternalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

using WarningSink = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (stderr by default) and returns the
/// previous one. Passing an empty function restores the default.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace beamid
