#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace seigen {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DomainError {
 public:
  using DomainError::DomainError;
};

class KeyError : public Error {
 public:
  using Error::Error;
};

class CorruptionError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Iteration budget exhausted; keeps the last iterate for diagnostics.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> last)
      : Error(what), last_(std::move(last)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_; }

 private:
  std::vector<double> last_;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace seigen
