#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace quadcurl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request outside what an operation supports (quadrature degree, derivative order).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Interface/mesh configuration the cut machinery cannot handle.
class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what, int element = -1)
      : Error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// Non-finite values produced by user data callables.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Factorization breakdown; pivot is the original (unpermuted) row index when known.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what, std::optional<int> pivot = std::nullopt)
      : Error(what), pivot_(pivot) {}
  std::optional<int> pivot() const { return pivot_; }

 private:
  std::optional<int> pivot_;
};

}  // namespace quadcurl
