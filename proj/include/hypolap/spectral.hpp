#pragma once

// Smallest eigenpairs of graph hypoelliptic Laplacians and clustering of the
// resulting eigenvalues into near-degenerate groups.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hypolap/laplacian.hpp"
#include "hypolap/types.hpp"

namespace hypolap {

struct SolverOptions {
  double tol = 1e-8;
  std::size_t dense_threshold = 3000;  // dense eigensolve up to this size
  std::size_t basis_size = 0;          // Lanczos basis, 0 for automatic
  std::size_t max_matvecs = 200000;
  RngSeed seed;
};

struct SpectralResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // kappa x m, orthonormal columns
  Eigen::VectorXd residuals;     // |L v - lambda v|, recomputed explicitly
  std::vector<std::size_t> block_offsets;
  std::string method;            // "dense" or "lanczos"
  std::size_t matvecs = 0;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  // Rows of eigenvector l belonging to fibre j.
  Eigen::VectorXd segment(std::size_t l, std::size_t j) const;
};

// Each eigenvector's entry of largest magnitude (first one on ties) is made
// positive.
void fix_signs(Eigen::MatrixXd& vectors);

// The m smallest eigenpairs of a symmetric Laplacian (unnormalized or
// symmetric kind). Throws SolverError when the residual target is not met.
SpectralResult smallest_eigenpairs(const LaplacianOperator& laplacian, std::size_t m,
                                   const SolverOptions& options = {});

// Dense symmetric matrix version, used by tests and small instances.
SpectralResult smallest_eigenpairs(const Eigen::MatrixXd& laplacian, std::size_t m);

struct ClusterReport {
  std::vector<std::pair<std::size_t, std::size_t>> bounds;  // [begin, end)
  std::vector<std::size_t> multiplicities;
  std::vector<double> means;
  std::vector<double> ratios;  // empty unless there are at least two clusters
};

// Splits the sorted values where lambda_l - lambda_{l-1} exceeds
// rel_gap * max(lambda_{l-1}, max(values) * 1e-6).
ClusterReport cluster_eigenvalues(std::vector<double> values, double rel_gap);

// Means of the clusters after the first, divided by the first of them.
std::vector<double> normalized_cluster_ratios(const ClusterReport& report);

}  // namespace hypolap
