#include "hypolap/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hypolap/errors.hpp"

namespace hypolap {

namespace {

Eigen::VectorXd random_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = normal(rng);
  return v.normalized();
}

// Two passes of classical Gram-Schmidt against the first `cols` columns.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& basis, Eigen::Index cols,
                              Eigen::VectorXd& w) {
  Eigen::VectorXd h = basis.leftCols(cols).transpose() * w;
  w.noalias() -= basis.leftCols(cols) * h;
  const Eigen::VectorXd h2 = basis.leftCols(cols).transpose() * w;
  w.noalias() -= basis.leftCols(cols) * h2;
  return h + h2;
}

// Thick-restart run on the operator restricted to the orthogonal complement
// of the columns of `locked`. `basis_size` is already resolved. Matrix-vector
// products are added to `matvecs`, which also carries the shared budget.
LanczosResult thick_restart(const MatVec& op, std::size_t n, std::size_t m,
                            std::size_t p, const LanczosOptions& options,
                            const Eigen::MatrixXd& locked, std::mt19937_64& rng,
                            std::size_t& matvecs) {
  const auto pe = static_cast<Eigen::Index>(p);
  const auto me = static_cast<Eigen::Index>(m);
  const std::size_t keep = std::min(p - 1, m + (p - m) / 2);
  const Eigen::Index nl = locked.cols();

  const auto deflate = [&](Eigen::VectorXd& v) {
    if (nl > 0) orthogonalize(locked, nl, v);
  };

  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), pe + 1);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(pe, pe);
  {
    Eigen::VectorXd v0 = random_unit(n, rng);
    deflate(v0);
    basis.col(0) = v0.normalized();
  }

  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  LanczosResult result;
  double best = std::numeric_limits<double>::infinity();
  Eigen::Index start = 0;
  double scale = 0.0;  // running estimate of |A|, used for breakdown detection

  while (true) {
    double beta = 0.0;
    for (Eigen::Index j = start; j < pe; ++j) {
      op(std::span<const double>(basis.col(j).data(), n), std::span<double>(w.data(), n));
      ++result.matvecs;
      ++matvecs;
      deflate(w);
      const Eigen::VectorXd h = orthogonalize(basis, j + 1, w);
      for (Eigen::Index i = 0; i <= j; ++i) {
        t(i, j) = h(i);
        t(j, i) = h(i);
      }
      scale = std::max(scale, std::abs(h(j)));
      beta = w.norm();
      if (beta <= 1e-12 * std::max(scale, 1.0)) {
        // Invariant subspace found: continue with a fresh orthogonal direction.
        Eigen::VectorXd fresh = random_unit(n, rng);
        deflate(fresh);
        orthogonalize(basis, j + 1, fresh);
        basis.col(j + 1) = fresh.normalized();
        beta = 0.0;
      } else {
        basis.col(j + 1) = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    if (eig.info() != Eigen::Success) {
      throw SolverError("projected eigenproblem failed", best);
    }
    // Descending order of Ritz values.
    std::vector<Eigen::Index> order(p);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::reverse(order.begin(), order.end());
    const Eigen::VectorXd& theta = eig.eigenvalues();
    const Eigen::MatrixXd& y = eig.eigenvectors();

    double worst = 0.0;
    for (Eigen::Index q = 0; q < me; ++q) {
      worst = std::max(worst, beta * std::abs(y(pe - 1, order[q])));
    }
    best = std::min(best, worst);

    if (worst <= options.tol) {
      Eigen::MatrixXd ys(pe, me);
      result.values.resize(me);
      result.residuals.resize(me);
      for (Eigen::Index q = 0; q < me; ++q) {
        ys.col(q) = y.col(order[q]);
        result.values(q) = theta(order[q]);
        result.residuals(q) = beta * std::abs(y(pe - 1, order[q]));
      }
      result.vectors = basis.leftCols(pe) * ys;
      return result;
    }
    if (matvecs >= options.max_matvecs) {
      throw SolverError("Lanczos did not converge within " +
                            std::to_string(options.max_matvecs) +
                            " matrix-vector products (best residual bound " +
                            std::to_string(best) + ")",
                        best);
    }

    // Thick restart: keep the leading Ritz vectors and the residual direction.
    const auto ke = static_cast<Eigen::Index>(keep);
    Eigen::MatrixXd ys(pe, ke);
    for (Eigen::Index q = 0; q < ke; ++q) ys.col(q) = y.col(order[q]);
    const Eigen::VectorXd residual_dir = basis.col(pe);
    const Eigen::MatrixXd ritz = basis.leftCols(pe) * ys;
    basis.leftCols(ke) = ritz;
    basis.col(ke) = residual_dir;
    t.setZero();
    for (Eigen::Index q = 0; q < ke; ++q) t(q, q) = theta(order[q]);
    start = ke;
    ++result.restarts;
  }
}

}  // namespace

LanczosResult largest_eigenpairs(const MatVec& op, std::size_t n, std::size_t m,
                                 const LanczosOptions& options) {
  if (m == 0) return {};
  if (m >= n) throw_invalid("largest_eigenpairs: need m < n for the iterative solver");
  std::size_t p = options.basis_size;
  if (p == 0) p = std::max(2 * m + 20, 3 * m);
  p = std::min(p, n - 1);
  if (p <= m) throw_invalid("largest_eigenpairs: basis size must exceed m");

  std::mt19937_64 rng(options.seed.value);
  std::size_t matvecs = 0;
  LanczosResult result =
      thick_restart(op, n, m, p, options, Eigen::MatrixXd(), rng, matvecs);

  // A single Krylov sequence sees one direction per exactly repeated
  // eigenvalue. Search the complement of the converged vectors for anything
  // above the smallest kept value and swap it in until nothing is found.
  const std::size_t check_basis = std::min<std::size_t>(std::max<std::size_t>(p / 2, 20),
                                                        n - 1 - m);
  while (check_basis >= 2) {
    const LanczosResult extra =
        thick_restart(op, n, 1, check_basis, options, result.vectors, rng, matvecs);
    const Eigen::Index last = result.values.size() - 1;
    const double margin = std::max(options.tol, 1e-12 * std::abs(result.values(0)));
    if (!(extra.values(0) > result.values(last) + margin)) break;
    result.values(last) = extra.values(0);
    result.vectors.col(last) = extra.vectors.col(0);
    result.residuals(last) = extra.residuals(0);
    ++result.restarts;
    for (Eigen::Index q = last; q > 0 && result.values(q) > result.values(q - 1); --q) {
      std::swap(result.values(q), result.values(q - 1));
      result.vectors.col(q).swap(result.vectors.col(q - 1));
      std::swap(result.residuals(q), result.residuals(q - 1));
    }
  }
  result.matvecs = matvecs;
  return result;
}

}  // namespace hypolap
