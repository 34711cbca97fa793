#pragma once

// Degrees, alpha-renormalization and the graph hypoelliptic Laplacian
// variants, applied as diagonal scalings of a shared sparse weight matrix.

#include <memory>
#include <span>

#include "hypolap/block_matrix.hpp"

namespace hypolap {

enum class LaplacianKind {
  unnormalized,  // D - W
  random_walk,   // I - D^{-1} W
  symmetric,     // I - D^{-1/2} W D^{-1/2}
};

// Exact row sums of W. Throws ConnectivityError at the first zero row.
Eigen::VectorXd degree_vector(const BlockSparseMatrix& w);

// (W_alpha)_{kl} = W_kl / (q_k^alpha q_l^alpha) with q = degree_vector(W).
BlockSparseMatrix alpha_normalize(const BlockSparseMatrix& w, double alpha);
BlockSparseMatrix alpha_normalize(BlockSparseMatrix&& w, double alpha);

// Matrix-free Laplacian over a shared weight matrix. Degrees are computed
// from the stored weights at construction.
class LaplacianOperator {
 public:
  LaplacianOperator(std::shared_ptr<const BlockSparseMatrix> weights,
                    LaplacianKind kind);

  std::size_t size() const { return weights_->size(); }
  LaplacianKind kind() const { return kind_; }
  bool is_symmetric() const { return kind_ != LaplacianKind::random_walk; }
  const BlockSparseMatrix& weights() const { return *weights_; }
  const Eigen::VectorXd& degrees() const { return degrees_; }
  const std::vector<std::size_t>& block_offsets() const {
    return weights_->block_offsets();
  }

  // y = L x
  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  // Symmetric kind only: y = D^{-1/2} W D^{-1/2} x, so that L = I - S.
  void apply_normalized_adjacency(std::span<const double> x, std::span<double> y) const;

  // Upper bound on the spectrum: 2 for the normalized kinds, twice the
  // largest degree for the unnormalized one.
  double spectral_upper_bound() const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::shared_ptr<const BlockSparseMatrix> weights_;
  LaplacianKind kind_;
  Eigen::VectorXd degrees_;
  Eigen::VectorXd inv_sqrt_degrees_;
};

LaplacianOperator build_laplacian(BlockSparseMatrix w, LaplacianKind kind);

// alpha_normalize followed by build_laplacian, degrees recomputed from W_alpha.
LaplacianOperator build_hypoelliptic_chain(BlockSparseMatrix w, double alpha,
                                           LaplacianKind kind);

}  // namespace hypolap
