#pragma once

#include <stdexcept>
#include <string>

namespace phasefield {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, e.g. "singular-matrix".
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidMeshSize : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-mesh-size"; }
};

class IndexError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "index"; }
};

class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension"; }
};

class AssemblyError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "assembly"; }
};

class SpaceMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "space-mismatch"; }
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, long pivot)
      : Error(what), pivot_(pivot) {}
  const char* kind() const noexcept override { return "singular-matrix"; }
  /// Column at which factorization broke down, -1 if unknown.
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  const char* kind() const noexcept override { return "config"; }
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const char* kind() const noexcept override { return "io"; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace phasefield
