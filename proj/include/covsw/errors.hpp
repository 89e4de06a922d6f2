#pragma once

#include <stdexcept>
#include <string>

namespace covsw {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular Jacobian or metric, or a point outside the chart domain.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A state with h <= 0, a non-SPD metric, or non-finite components.
class InadmissibleState : public Error {
 public:
  using Error::Error;
};

/// Degenerate domains, generator failures, folded mapped meshes.
class MeshError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by the time loop when an updated cell average is inadmissible.
class SolverAbort : public Error {
 public:
  SolverAbort(const std::string& what, std::size_t cell)
      : Error(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

}  // namespace covsw
