#include "hypolap/block_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hypolap/errors.hpp"

namespace hypolap {

namespace {

void check_offsets(const std::vector<std::size_t>& offsets, std::size_t n) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != n) {
    throw_invalid("block offsets must start at 0 and end at the matrix size");
  }
  if (!std::is_sorted(offsets.begin(), offsets.end())) {
    throw_invalid("block offsets must be non-decreasing");
  }
}

std::vector<std::size_t> singleton_blocks(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  return offsets;
}

}  // namespace

BlockSparseMatrix::BlockSparseMatrix(std::vector<std::size_t> block_offsets,
                                     std::vector<std::int64_t> row_ptr,
                                     std::vector<std::int32_t> cols,
                                     std::vector<double> values)
    : offsets_(std::move(block_offsets)),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      values_(std::move(values)) {
  if (row_ptr_.empty()) throw_invalid("row pointer array is empty");
  n_ = row_ptr_.size() - 1;
  check_offsets(offsets_, n_);
  if (n_ > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw_invalid("matrix too large for 32-bit column indices");
  }
  if (cols_.size() != values_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != values_.size() ||
      row_ptr_.front() != 0) {
    throw_invalid("inconsistent compressed-row arrays");
  }
  for (std::size_t r = 0; r < n_; ++r) {
    if (row_ptr_[r + 1] < row_ptr_[r]) throw_invalid("row pointer decreases");
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto c = cols_[static_cast<std::size_t>(k)];
      if (c < 0 || static_cast<std::size_t>(c) >= n_) {
        throw_invalid("column index out of range");
      }
      if (k > row_ptr_[r] && cols_[static_cast<std::size_t>(k - 1)] >= c) {
        throw_invalid("columns must be strictly ascending within a row");
      }
    }
  }
}

BlockSparseMatrix BlockSparseMatrix::from_entries(
    std::vector<std::size_t> block_offsets, std::vector<MatrixEntry> entries) {
  if (block_offsets.empty()) throw_invalid("block offsets are empty");
  const std::size_t n = block_offsets.back();
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  std::vector<std::int64_t> row_ptr(n + 1, 0);
  std::vector<std::int32_t> cols;
  std::vector<double> values;
  cols.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.row >= n || e.col >= n) throw_invalid("entry index out of range");
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
      throw_invalid("duplicate matrix entry");
    }
    ++row_ptr[e.row + 1];
    cols.push_back(static_cast<std::int32_t>(e.col));
    values.push_back(e.value);
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return BlockSparseMatrix(std::move(block_offsets), std::move(row_ptr),
                           std::move(cols), std::move(values));
}

BlockSparseMatrix BlockSparseMatrix::from_dense(const Eigen::MatrixXd& dense) {
  return from_dense(dense, singleton_blocks(static_cast<std::size_t>(dense.rows())));
}

BlockSparseMatrix BlockSparseMatrix::from_dense(
    const Eigen::MatrixXd& dense, std::vector<std::size_t> block_offsets) {
  if (dense.rows() != dense.cols()) throw_invalid("from_dense: matrix not square");
  std::vector<MatrixEntry> entries;
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    for (Eigen::Index c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        entries.push_back({static_cast<std::size_t>(r),
                           static_cast<std::size_t>(c), dense(r, c)});
      }
    }
  }
  return from_entries(std::move(block_offsets), std::move(entries));
}

std::size_t BlockSparseMatrix::block_of(std::size_t row) const {
  if (row >= n_) throw_invalid("block_of: row out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), row);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

std::vector<MatrixEntry> BlockSparseMatrix::entries() const {
  std::vector<MatrixEntry> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < n_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      out.push_back({r, static_cast<std::size_t>(cols_[kk]), values_[kk]});
    }
  }
  return out;
}

double BlockSparseMatrix::coeff(std::size_t row, std::size_t col) const {
  if (row >= n_ || col >= n_) throw_invalid("coeff: index out of range");
  const auto begin = cols_.begin() + row_ptr_[row];
  const auto end = cols_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(col));
  if (it == end || *it != static_cast<std::int32_t>(col)) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void BlockSparseMatrix::multiply(std::span<const double> x,
                                 std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw_invalid("multiply: size mismatch");
  const double* val = values_.data();
  const std::int32_t* col = cols_.data();
  const std::int64_t* ptr = row_ptr_.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n_); ++r) {
    double acc = 0.0;
    for (auto k = ptr[r]; k < ptr[r + 1]; ++k) acc += val[k] * x[static_cast<std::size_t>(col[k])];
    y[static_cast<std::size_t>(r)] = acc;
  }
}

Eigen::VectorXd BlockSparseMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
           std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

Eigen::VectorXd BlockSparseMatrix::row_sums() const {
  Eigen::VectorXd sums(static_cast<Eigen::Index>(n_));
  for (std::size_t r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[static_cast<std::size_t>(k)];
    }
    sums(static_cast<Eigen::Index>(r)) = acc;
  }
  return sums;
}

void BlockSparseMatrix::scale_in_place(const Eigen::VectorXd& left,
                                       const Eigen::VectorXd& right) {
  if (static_cast<std::size_t>(left.size()) != n_ ||
      static_cast<std::size_t>(right.size()) != n_) {
    throw_invalid("scaled: scaling vector size mismatch");
  }
  for (std::size_t r = 0; r < n_; ++r) {
    const double lr = left(static_cast<Eigen::Index>(r));
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      // Scale factor first: with left == right the mirrored entries see the
      // same product, which keeps a symmetric matrix exactly symmetric.
      values_[kk] = values_[kk] * (lr * right(cols_[kk]));
    }
  }
}

BlockSparseMatrix BlockSparseMatrix::scaled(const Eigen::VectorXd& left,
                                            const Eigen::VectorXd& right) const& {
  BlockSparseMatrix copy = *this;
  copy.scale_in_place(left, right);
  return copy;
}

BlockSparseMatrix BlockSparseMatrix::scaled(const Eigen::VectorXd& left,
                                            const Eigen::VectorXd& right) && {
  scale_in_place(left, right);
  return std::move(*this);
}

Eigen::MatrixXd BlockSparseMatrix::to_dense() const {
  Eigen::MatrixXd dense =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t r = 0; r < n_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      dense(static_cast<Eigen::Index>(r), cols_[kk]) = values_[kk];
    }
  }
  return dense;
}

double BlockSparseMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < n_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const double mirror = coeff(static_cast<std::size_t>(cols_[kk]), r);
      worst = std::max(worst, std::abs(values_[kk] - mirror));
    }
  }
  return worst;
}

bool BlockSparseMatrix::diagonal_blocks_zero() const {
  for (std::size_t b = 0; b + 1 < offsets_.size(); ++b) {
    for (std::size_t r = offsets_[b]; r < offsets_[b + 1]; ++r) {
      for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const auto c = static_cast<std::size_t>(cols_[kk]);
        if (c >= offsets_[b] && c < offsets_[b + 1] && values_[kk] != 0.0) {
          return false;
        }
      }
    }
  }
  return true;
}

bool BlockSparseMatrix::all_nonnegative() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v >= 0.0; });
}

}  // namespace hypolap
