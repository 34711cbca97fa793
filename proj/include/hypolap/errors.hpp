#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypolap {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Degenerate geometric input: non-tangent vectors, coincident or antipodal
// transport endpoints.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class FrameEstimationError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

// A vertex with zero degree, i.e. the affinity graph is not connected.
class ConnectivityError : public Error {
 public:
  ConnectivityError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace hypolap
