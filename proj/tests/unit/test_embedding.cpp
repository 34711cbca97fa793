#include "doctest.h"

#include <cmath>
#include <random>

#include "hypolap/embedding.hpp"
#include "hypolap/errors.hpp"

using namespace hypolap;

namespace {

// Dense symmetric normalized Laplacian of a random block matrix.
Eigen::MatrixXd random_symmetric_laplacian(const std::vector<std::size_t>& offsets,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const auto n = static_cast<Eigen::Index>(offsets.back());
  auto block = [&](Eigen::Index k) {
    std::size_t b = 0;
    while (offsets[b + 1] <= static_cast<std::size_t>(k)) ++b;
    return b;
  };
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (block(i) != block(j)) w(i, j) = w(j, i) = u(rng);
    }
  }
  const Eigen::VectorXd s = w.rowwise().sum().cwiseSqrt().cwiseInverse();
  return Eigen::MatrixXd::Identity(n, n) - s.asDiagonal() * w * s.asDiagonal();
}

SpectralResult full_spectrum(const Eigen::MatrixXd& l, const std::vector<std::size_t>& offsets) {
  SpectralResult r = smallest_eigenpairs(l, static_cast<std::size_t>(l.rows()));
  r.block_offsets = offsets;
  return r;
}

}  // namespace

TEST_CASE("embedding weights") {
  CHECK(embedding_weight(0.0, 0.0, EmbeddingConvention::paper_literal) == 1.0);
  CHECK(embedding_weight(0.5, 2.0, EmbeddingConvention::paper_literal) == 0.25);
  CHECK(embedding_weight(0.25, 2.0, EmbeddingConvention::diffusion) == 0.5625);
  CHECK(embedding_weight(-1e-13, 1.0, EmbeddingConvention::paper_literal) == 0.0);
  CHECK(embedding_weight(1.0 + 1e-12, 1.0, EmbeddingConvention::diffusion) == 0.0);
  CHECK_THROWS_AS(embedding_weight(1.5, 2.0, EmbeddingConvention::diffusion), InvalidArgument);
  CHECK_THROWS_AS(embedding_weight(-0.1, 1.0, EmbeddingConvention::paper_literal),
                  InvalidArgument);
  CHECK_THROWS_AS(embedding_weight(0.5, -1.0, EmbeddingConvention::paper_literal),
                  InvalidArgument);
}

TEST_CASE("two-node embedding") {
  Eigen::MatrixXd l(2, 2);
  l << 1, -1, -1, 1;
  const auto spec = smallest_eigenpairs(l, 2);
  const auto h = hdm_embed(spec, 1.0);
  REQUIRE(h.per_point.cols() == 1);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(h.per_point(0, 0) == doctest::Approx(2.0 * r));
  CHECK(h.per_point(1, 0) == doctest::Approx(-2.0 * r));
}

TEST_CASE("t = 0 gives raw eigenvectors and conventions differ by column scale") {
  const std::vector<std::size_t> offsets = {0, 3, 7, 10};
  const auto spec = full_spectrum(random_symmetric_laplacian(offsets, 3), offsets);
  const auto raw = hdm_embed(spec, 0.0);
  CHECK(raw.per_point == spec.eigenvectors.rightCols(9));
  CHECK_THROWS_AS(hdm_embed(spec, 1.0, EmbeddingConvention::diffusion), InvalidArgument);
  // Eigenpairs with lambda <= 1 only, as the diffusion convention requires.
  Eigen::Index k = 0;
  while (k < spec.eigenvalues.size() && spec.eigenvalues(k) <= 1.0) ++k;
  REQUIRE(k >= 3);
  SpectralResult low = spec;
  low.eigenvalues = spec.eigenvalues.head(k);
  low.eigenvectors = spec.eigenvectors.leftCols(k);
  const auto a = hdm_embed(low, 1.5, EmbeddingConvention::paper_literal);
  const auto b = hdm_embed(low, 1.5, EmbeddingConvention::diffusion);
  for (Eigen::Index c = 0; c < a.per_point.cols(); ++c) {
    const Eigen::ArrayXd ratio = a.per_point.col(c).array() / b.per_point.col(c).array();
    CHECK((ratio - ratio(0)).abs().maxCoeff() < 1e-10 * std::abs(ratio(0)));
  }
}

TEST_CASE("normalization and distances") {
  EmbeddingCoordinates c;
  c.per_point.resize(2, 2);
  c.per_point << 3, 4, 0, 0;
  CHECK(hdm_distance(c, 0, 1) == 5.0);
  CHECK(hdm_distance(c, 0, 1) == hdm_distance(c, 1, 0));
  CHECK(hdm_distance(c, 1, 1) == 0.0);
  CHECK_THROWS_AS(hdm_normalize(c), InvalidArgument);
  c.per_point.row(1) << 1, 0;
  const auto n = hdm_normalize(c);
  CHECK(n.normalized);
  CHECK(n.per_point(0, 0) == doctest::Approx(0.6));
  CHECK(n.per_point(0, 1) == doctest::Approx(0.8));
  const auto again = hdm_normalize(n);
  CHECK((again.per_point - n.per_point).cwiseAbs().maxCoeff() <= 1e-15);

  const std::vector<std::size_t> offsets = {0, 4, 8, 12};
  const auto spec = full_spectrum(random_symmetric_laplacian(offsets, 9), offsets);
  const auto h = hdm_normalize(hdm_embed(spec, 1.0));
  for (Eigen::Index r = 0; r < h.per_point.rows(); ++r) {
    CHECK(std::abs(h.per_point.row(r).norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("base embedding inner products equal block Frobenius norms of L^t") {
  const std::vector<std::size_t> offsets = {0, 4, 9, 12};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Eigen::MatrixXd l = random_symmetric_laplacian(offsets, seed);
    const auto spec = full_spectrum(l, offsets);
    for (int t : {1, 2, 3}) {
      const auto v = hbdm_embed(spec, t);
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(l.rows(), l.cols());
      for (int k = 0; k < t; ++k) power = power * l;
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          const auto bi = static_cast<Eigen::Index>(offsets[i]);
          const auto bj = static_cast<Eigen::Index>(offsets[j]);
          const auto ni = static_cast<Eigen::Index>(offsets[i + 1] - offsets[i]);
          const auto nj = static_cast<Eigen::Index>(offsets[j + 1] - offsets[j]);
          const double frob = power.block(bi, bj, ni, nj).squaredNorm();
          const double inner = v.per_fibre.row(static_cast<Eigen::Index>(i))
                                   .dot(v.per_fibre.row(static_cast<Eigen::Index>(j)));
          CHECK(std::abs(inner - frob) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("single-fibre base embedding is diagonal") {
  const std::vector<std::size_t> offsets = {0, 5};
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(5, 5);
  l.diagonal() << 0.0, 0.3, 0.7, 1.1, 1.9;
  const auto spec = full_spectrum(l, offsets);
  const auto v = hbdm_embed(spec, 2.0);
  for (Eigen::Index a = 0; a < 5; ++a) {
    for (Eigen::Index b = 0; b < 5; ++b) {
      const double expected = a == b ? std::pow(spec.eigenvalues(a), 2.0) : 0.0;
      CHECK(std::abs(v.per_fibre(0, a * 5 + b) - expected) <= 1e-14);
    }
  }
  CHECK(hbdm_distance(v, 0, 0) == 0.0);
}
