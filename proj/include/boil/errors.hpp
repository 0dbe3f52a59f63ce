#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boil {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : Error(what + " (line " + std::to_string(line) + ", offset " +
              std::to_string(offset) + ")"),
        line_(line),
        offset_(offset) {}

  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

class EmptyGrid : public ValidationError {
 public:
  EmptyGrid() : ValidationError("grid has zero cells") {}
};

class AllWalls : public ValidationError {
 public:
  AllWalls() : ValidationError("grid has no open cells") {}
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

/// Thrown by the stationary solver when the residual bound is not reached.
class NotConverged : public Error {
 public:
  NotConverged(int iterations, double residual)
      : Error("power iteration did not converge after " +
              std::to_string(iterations) + " iterations (residual " +
              std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class ZeroMassNode : public Error {
 public:
  explicit ZeroMassNode(std::size_t node)
      : Error("node " + std::to_string(node) + " has no outgoing probability mass"),
        node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonContiguousPath : public Error {
 public:
  using Error::Error;
};

class EmptyPatrolSet : public Error {
 public:
  EmptyPatrolSet() : Error("patrol set is empty") {}
};

class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

class SupportMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace boil
