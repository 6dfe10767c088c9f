#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace uwc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error hierarchy. Each category maps to a stable CLI exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class UnboundedError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class ResourceLimitError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace uwc
