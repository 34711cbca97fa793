#include "hypolap/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "hypolap/errors.hpp"
#include "hypolap/lanczos.hpp"

namespace hypolap {

Eigen::VectorXd SpectralResult::segment(std::size_t l, std::size_t j) const {
  if (l >= size()) throw_invalid("SpectralResult::segment: eigenvector index out of range");
  if (j + 1 >= block_offsets.size()) {
    throw_invalid("SpectralResult::segment: fibre index out of range");
  }
  const auto begin = static_cast<Eigen::Index>(block_offsets[j]);
  const auto len = static_cast<Eigen::Index>(block_offsets[j + 1] - block_offsets[j]);
  return eigenvectors.col(static_cast<Eigen::Index>(l)).segment(begin, len);
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index at = 0;
    double biggest = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > biggest * (1.0 + 1e-12) + 1e-300) {
        biggest = a;
        at = r;
      }
    }
    if (vectors.rows() > 0 && vectors(at, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

namespace {

Eigen::VectorXd explicit_residuals(const LaplacianOperator& laplacian,
                                   const Eigen::VectorXd& values,
                                   const Eigen::MatrixXd& vectors) {
  Eigen::VectorXd res(values.size());
  for (Eigen::Index l = 0; l < values.size(); ++l) {
    const Eigen::VectorXd v = vectors.col(l);
    res(l) = (laplacian.apply(v) - values(l) * v).norm();
  }
  return res;
}

}  // namespace

SpectralResult smallest_eigenpairs(const Eigen::MatrixXd& laplacian, std::size_t m) {
  if (laplacian.rows() != laplacian.cols()) throw_invalid("Laplacian must be square");
  const auto n = static_cast<std::size_t>(laplacian.rows());
  if (m > n) throw_invalid("requested more eigenpairs than the matrix size");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
  if (eig.info() != Eigen::Success) throw SolverError("dense eigensolver failed", 0.0);
  SpectralResult out;
  const auto me = static_cast<Eigen::Index>(m);
  out.eigenvalues = eig.eigenvalues().head(me);
  out.eigenvectors = eig.eigenvectors().leftCols(me);
  fix_signs(out.eigenvectors);
  out.residuals.resize(me);
  for (Eigen::Index l = 0; l < me; ++l) {
    out.residuals(l) = (laplacian * out.eigenvectors.col(l) -
                        out.eigenvalues(l) * out.eigenvectors.col(l))
                           .norm();
  }
  out.block_offsets.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out.block_offsets[k] = k;
  out.method = "dense";
  return out;
}

SpectralResult smallest_eigenpairs(const LaplacianOperator& laplacian, std::size_t m,
                                   const SolverOptions& options) {
  if (!laplacian.is_symmetric()) {
    throw_invalid("smallest_eigenpairs needs a symmetric Laplacian; the random-walk "
                  "variant shares the spectrum of the symmetric one");
  }
  const std::size_t n = laplacian.size();
  if (m > n) throw_invalid("requested more eigenpairs than the matrix size");

  SpectralResult out;
  if (n <= options.dense_threshold || m + 1 >= n) {
    out = smallest_eigenpairs(laplacian.to_dense(), m);
  } else {
    LanczosOptions lo;
    lo.tol = options.tol;
    lo.basis_size = options.basis_size;
    lo.max_matvecs = options.max_matvecs;
    lo.seed = options.seed;
    LanczosResult lr;
    double shift = 1.0;
    if (laplacian.kind() == LaplacianKind::symmetric) {
      // L = I - S: the smallest eigenvalues of L are the largest of S.
      lr = largest_eigenpairs(
          [&](std::span<const double> x, std::span<double> y) {
            laplacian.apply_normalized_adjacency(x, y);
          },
          n, m, lo);
    } else {
      shift = laplacian.spectral_upper_bound();
      lr = largest_eigenpairs(
          [&](std::span<const double> x, std::span<double> y) {
            laplacian.apply(x, y);
            for (std::size_t k = 0; k < n; ++k) y[k] = shift * x[k] - y[k];
          },
          n, m, lo);
    }
    out.eigenvalues = (shift - lr.values.array()).matrix();
    out.eigenvectors = std::move(lr.vectors);
    fix_signs(out.eigenvectors);
    out.residuals = explicit_residuals(laplacian, out.eigenvalues, out.eigenvectors);
    out.method = "lanczos";
    out.matvecs = lr.matvecs;
    // Allow for rounding in the explicit recomputation of the residual.
    const double worst = out.residuals.size() ? out.residuals.maxCoeff() : 0.0;
    if (worst > 10.0 * options.tol) {
      throw SolverError("Lanczos residual check failed: " + std::to_string(worst), worst);
    }
  }
  out.block_offsets = laplacian.block_offsets();
  return out;
}

ClusterReport cluster_eigenvalues(std::vector<double> values, double rel_gap) {
  if (!(rel_gap > 0.0)) throw_invalid("cluster_eigenvalues: rel_gap must be positive");
  ClusterReport report;
  if (values.empty()) return report;
  std::sort(values.begin(), values.end());
  const double floor = values.back() * 1e-6;
  std::size_t begin = 0;
  const auto close = [&](std::size_t end) {
    double sum = 0.0;
    for (std::size_t k = begin; k < end; ++k) sum += values[k];
    report.bounds.emplace_back(begin, end);
    report.multiplicities.push_back(end - begin);
    report.means.push_back(sum / static_cast<double>(end - begin));
    begin = end;
  };
  for (std::size_t l = 1; l < values.size(); ++l) {
    if (values[l] - values[l - 1] > rel_gap * std::max(values[l - 1], floor)) close(l);
  }
  close(values.size());
  if (report.means.size() >= 2) report.ratios = normalized_cluster_ratios(report);
  return report;
}

std::vector<double> normalized_cluster_ratios(const ClusterReport& report) {
  if (report.means.size() < 2) {
    throw_invalid("normalized_cluster_ratios: only the zero cluster is present");
  }
  std::vector<double> ratios;
  for (std::size_t c = 1; c < report.means.size(); ++c) {
    ratios.push_back(report.means[c] / report.means[1]);
  }
  return ratios;
}

}  // namespace hypolap
