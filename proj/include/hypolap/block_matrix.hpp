#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hypolap {

struct MatrixEntry {
  std::size_t row;
  std::size_t col;
  double value;

  bool operator==(const MatrixEntry&) const = default;
};

// Symmetric non-negative kappa x kappa weight matrix whose rows and columns
// are grouped into fibre blocks. Stored as compressed rows with columns
// ascending, i.e. a coordinate list sorted by (row, col). Immutable once
// built; the scaling helpers return new matrices unless called on an rvalue.
class BlockSparseMatrix {
 public:
  BlockSparseMatrix() = default;

  // `block_offsets` has one entry per fibre plus a final entry equal to n.
  BlockSparseMatrix(std::vector<std::size_t> block_offsets,
                    std::vector<std::int64_t> row_ptr,
                    std::vector<std::int32_t> cols, std::vector<double> values);

  // Sorts the entries, rejects duplicates and out-of-range indices.
  static BlockSparseMatrix from_entries(std::vector<std::size_t> block_offsets,
                                        std::vector<MatrixEntry> entries);

  // Each row in its own block.
  static BlockSparseMatrix from_dense(const Eigen::MatrixXd& dense);
  static BlockSparseMatrix from_dense(const Eigen::MatrixXd& dense,
                                      std::vector<std::size_t> block_offsets);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  std::size_t num_blocks() const {
    return offsets_.empty() ? 0 : offsets_.size() - 1;
  }
  const std::vector<std::size_t>& block_offsets() const { return offsets_; }
  std::size_t block_of(std::size_t row) const;

  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const std::int32_t> col_index() const { return cols_; }
  std::span<const double> values() const { return values_; }

  std::vector<MatrixEntry> entries() const;
  double coeff(std::size_t row, std::size_t col) const;

  // y = W x
  void multiply(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

  Eigen::VectorXd row_sums() const;

  // W_kl * left_k * right_l.
  BlockSparseMatrix scaled(const Eigen::VectorXd& left,
                           const Eigen::VectorXd& right) const&;
  BlockSparseMatrix scaled(const Eigen::VectorXd& left,
                           const Eigen::VectorXd& right) &&;

  Eigen::MatrixXd to_dense() const;

  // max |W_kl - W_lk| over stored entries (missing mirror counts as |W_kl|).
  double max_asymmetry() const;
  bool diagonal_blocks_zero() const;
  bool all_nonnegative() const;

  bool operator==(const BlockSparseMatrix&) const = default;

 private:
  void scale_in_place(const Eigen::VectorXd& left, const Eigen::VectorXd& right);

  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> values_;
};

}  // namespace hypolap
