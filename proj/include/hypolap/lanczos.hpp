#pragma once

// Thick-restart Lanczos for the largest eigenpairs of a symmetric operator,
// with full reorthogonalization.

#include <cstddef>
#include <functional>
#include <span>

#include "hypolap/types.hpp"

namespace hypolap {

using MatVec = std::function<void(std::span<const double>, std::span<double>)>;

struct LanczosOptions {
  double tol = 1e-8;               // on |A v - theta v| for unit v
  std::size_t basis_size = 0;      // 0 selects max(2m + 20, 3m) capped by n - 1
  std::size_t max_matvecs = 200000;
  RngSeed seed;
};

struct LanczosResult {
  Eigen::VectorXd values;     // descending
  Eigen::MatrixXd vectors;    // n x m, orthonormal
  Eigen::VectorXd residuals;  // estimated |A v - theta v|
  std::size_t matvecs = 0;
  std::size_t restarts = 0;
};

// Throws SolverError carrying the best residual bound reached when the
// matrix-vector budget runs out.
LanczosResult largest_eigenpairs(const MatVec& op, std::size_t n, std::size_t m,
                                 const LanczosOptions& options);

}  // namespace hypolap
