#include "hypolap/laplacian.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hypolap/errors.hpp"

namespace hypolap {

Eigen::VectorXd degree_vector(const BlockSparseMatrix& w) {
  Eigen::VectorXd q = w.row_sums();
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    if (!(q(k) > 0.0)) {
      throw ConnectivityError("vertex " + std::to_string(k) +
                                  " has zero degree; the affinity graph is not connected",
                              static_cast<std::size_t>(k));
    }
  }
  return q;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw_invalid("alpha must lie in [0, 1]");
}

Eigen::VectorXd alpha_scaling(const BlockSparseMatrix& w, double alpha) {
  const Eigen::VectorXd q = degree_vector(w);
  return q.array().pow(-alpha).matrix();
}

}  // namespace

BlockSparseMatrix alpha_normalize(const BlockSparseMatrix& w, double alpha) {
  check_alpha(alpha);
  const Eigen::VectorXd s = alpha_scaling(w, alpha);
  if (alpha == 0.0) return w;
  return w.scaled(s, s);
}

BlockSparseMatrix alpha_normalize(BlockSparseMatrix&& w, double alpha) {
  check_alpha(alpha);
  const Eigen::VectorXd s = alpha_scaling(w, alpha);
  if (alpha == 0.0) return std::move(w);
  return std::move(w).scaled(s, s);
}

LaplacianOperator::LaplacianOperator(std::shared_ptr<const BlockSparseMatrix> weights,
                                     LaplacianKind kind)
    : weights_(std::move(weights)), kind_(kind) {
  if (!weights_) throw_invalid("LaplacianOperator: null weight matrix");
  degrees_ = degree_vector(*weights_);
  inv_sqrt_degrees_ = degrees_.array().rsqrt().matrix();
}

void LaplacianOperator::apply_normalized_adjacency(std::span<const double> x,
                                                   std::span<double> y) const {
  const std::size_t n = size();
  if (x.size() != n || y.size() != n) throw_invalid("Laplacian apply: size mismatch");
  std::vector<double> scaled(n);
  for (std::size_t k = 0; k < n; ++k) {
    scaled[k] = inv_sqrt_degrees_(static_cast<Eigen::Index>(k)) * x[k];
  }
  weights_->multiply(scaled, y);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] *= inv_sqrt_degrees_(static_cast<Eigen::Index>(k));
  }
}

void LaplacianOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  if (x.size() != n || y.size() != n) throw_invalid("Laplacian apply: size mismatch");
  switch (kind_) {
    case LaplacianKind::unnormalized:
      weights_->multiply(x, y);
      for (std::size_t k = 0; k < n; ++k) {
        y[k] = degrees_(static_cast<Eigen::Index>(k)) * x[k] - y[k];
      }
      break;
    case LaplacianKind::random_walk:
      weights_->multiply(x, y);
      for (std::size_t k = 0; k < n; ++k) {
        y[k] = x[k] - y[k] / degrees_(static_cast<Eigen::Index>(k));
      }
      break;
    case LaplacianKind::symmetric:
      apply_normalized_adjacency(x, y);
      for (std::size_t k = 0; k < n; ++k) y[k] = x[k] - y[k];
      break;
  }
}

Eigen::VectorXd LaplacianOperator::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
        std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

double LaplacianOperator::spectral_upper_bound() const {
  if (kind_ == LaplacianKind::unnormalized) return 2.0 * degrees_.maxCoeff();
  return 2.0;
}

Eigen::MatrixXd LaplacianOperator::to_dense() const {
  const Eigen::MatrixXd w = weights_->to_dense();
  const auto n = static_cast<Eigen::Index>(size());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  switch (kind_) {
    case LaplacianKind::unnormalized:
      return Eigen::MatrixXd(degrees_.asDiagonal()) - w;
    case LaplacianKind::random_walk:
      return eye - degrees_.cwiseInverse().asDiagonal() * w;
    case LaplacianKind::symmetric:
      return eye - inv_sqrt_degrees_.asDiagonal() * w * inv_sqrt_degrees_.asDiagonal();
  }
  return eye;
}

LaplacianOperator build_laplacian(BlockSparseMatrix w, LaplacianKind kind) {
  return LaplacianOperator(std::make_shared<const BlockSparseMatrix>(std::move(w)), kind);
}

LaplacianOperator build_hypoelliptic_chain(BlockSparseMatrix w, double alpha,
                                           LaplacianKind kind) {
  return build_laplacian(alpha_normalize(std::move(w), alpha), kind);
}

}  // namespace hypolap
