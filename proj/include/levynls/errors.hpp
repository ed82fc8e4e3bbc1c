#pragma once

#include <stdexcept>
#include <string>

namespace levynls {

/// Invalid or inconsistent run parameters.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Coefficient vector or matrix does not match the basis it is used with.
class ShapeError : public std::length_error {
 public:
  explicit ShapeError(const std::string& what) : std::length_error(what) {}
};

/// Floating point failure: non-finite values, failed decompositions, step underflow.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Caller misuse such as empty ensembles.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Output directory or file could not be written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levynls
