#include "hypolap/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypolap/errors.hpp"

namespace hypolap {

namespace {

// Eigenvalues that are negative only through rounding are treated as zero so
// that fractional powers stay real.
double clamp_rounding(double x, const char* what) {
  if (x >= 0.0) return x;
  if (x > -1e-10) return 0.0;
  throw_invalid(std::string(what) + " is negative: " + std::to_string(x));
}

}  // namespace

double embedding_weight(double lambda, double t, EmbeddingConvention convention) {
  if (!(t >= 0.0)) throw_invalid("diffusion time t must be non-negative");
  double base = 0.0;
  if (convention == EmbeddingConvention::paper_literal) {
    base = clamp_rounding(lambda, "Laplacian eigenvalue");
  } else {
    if (lambda > 1.0 + 1e-10) {
      throw_invalid("diffusion convention needs eigenvalues <= 1, got " +
                    std::to_string(lambda));
    }
    base = std::max(1.0 - lambda, 0.0);
  }
  if (t == 0.0) return 1.0;
  return std::pow(base, t);
}

EmbeddingCoordinates hdm_embed(const SpectralResult& spec, double t,
                               EmbeddingConvention convention) {
  const auto m = static_cast<Eigen::Index>(spec.size());
  if (m < 2) throw_invalid("hdm_embed needs at least two eigenpairs");
  EmbeddingCoordinates out;
  out.convention = convention;
  out.t = t;
  out.per_point.resize(spec.eigenvectors.rows(), m - 1);
  for (Eigen::Index l = 1; l < m; ++l) {
    out.per_point.col(l - 1) =
        embedding_weight(spec.eigenvalues(l), t, convention) * spec.eigenvectors.col(l);
  }
  return out;
}

EmbeddingCoordinates hdm_normalize(const EmbeddingCoordinates& coords) {
  EmbeddingCoordinates out = coords;
  for (Eigen::Index r = 0; r < out.per_point.rows(); ++r) {
    const double norm = out.per_point.row(r).norm();
    if (!(norm > 0.0)) {
      throw_invalid("hdm_normalize: embedding row " + std::to_string(r) + " is zero");
    }
    out.per_point.row(r) /= norm;
  }
  out.normalized = true;
  return out;
}

double hdm_distance(const EmbeddingCoordinates& coords, std::size_t p, std::size_t q) {
  const auto rows = static_cast<std::size_t>(coords.per_point.rows());
  if (p >= rows || q >= rows) throw_invalid("hdm_distance: point index out of range");
  return (coords.per_point.row(static_cast<Eigen::Index>(p)) -
          coords.per_point.row(static_cast<Eigen::Index>(q)))
      .norm();
}

BaseEmbeddingCoordinates hbdm_embed(const SpectralResult& spec, double t) {
  const auto m = static_cast<Eigen::Index>(spec.size());
  if (spec.block_offsets.size() < 2) throw_invalid("hbdm_embed: missing block offsets");
  const std::size_t nb = spec.block_offsets.size() - 1;
  Eigen::VectorXd w(m);
  for (Eigen::Index l = 0; l < m; ++l) {
    w(l) = embedding_weight(spec.eigenvalues(l), 0.5 * t,
                            EmbeddingConvention::paper_literal);
  }
  BaseEmbeddingCoordinates out;
  out.t = t;
  out.per_fibre.resize(static_cast<Eigen::Index>(nb), m * m);
  for (std::size_t j = 0; j < nb; ++j) {
    const auto begin = static_cast<Eigen::Index>(spec.block_offsets[j]);
    const auto len =
        static_cast<Eigen::Index>(spec.block_offsets[j + 1] - spec.block_offsets[j]);
    const auto seg = spec.eigenvectors.middleRows(begin, len);
    const Eigen::MatrixXd gram = seg.transpose() * seg;
    for (Eigen::Index l = 0; l < m; ++l) {
      for (Eigen::Index k = 0; k < m; ++k) {
        out.per_fibre(static_cast<Eigen::Index>(j), l * m + k) = w(l) * w(k) * gram(l, k);
      }
    }
  }
  return out;
}

double hbdm_distance(const BaseEmbeddingCoordinates& coords, std::size_t i,
                     std::size_t j) {
  const auto rows = static_cast<std::size_t>(coords.per_fibre.rows());
  if (i >= rows || j >= rows) throw_invalid("hbdm_distance: fibre index out of range");
  return (coords.per_fibre.row(static_cast<Eigen::Index>(i)) -
          coords.per_fibre.row(static_cast<Eigen::Index>(j)))
      .norm();
}

}  // namespace hypolap
