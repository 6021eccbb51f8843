#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace membrane {

// Base for every error this library raises. `kind()` is a short stable tag
// used by the CLI to print machine-parsable error lines.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse", "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A linear system whose condition estimate exceeds the accepted threshold,
// or whose factorization broke down.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double cond_estimate)
      : Error("singular-system", what), cond_estimate_(cond_estimate) {}
  double cond_estimate() const noexcept { return cond_estimate_; }

 private:
  double cond_estimate_;
};

class DegenerateJetError : public Error {
 public:
  explicit DegenerateJetError(const std::string& what) : Error("degenerate-jet", what) {}
};

class MeshError : public Error {
 public:
  explicit MeshError(const std::string& what) : Error("mesh", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace membrane
