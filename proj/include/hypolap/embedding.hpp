#pragma once

// Spectral embeddings built from the eigenpairs of a symmetric graph
// hypoelliptic Laplacian: per-sample coordinates H^t and their row-normalized
// form, and per-fibre coordinates V^t.

#include <cstddef>

#include "hypolap/spectral.hpp"

namespace hypolap {

enum class EmbeddingConvention {
  paper_literal,  // eigenvector l weighted by lambda_l^t
  diffusion,      // eigenvector l weighted by (1 - lambda_l)^t
};

struct EmbeddingCoordinates {
  Eigen::MatrixXd per_point;  // kappa x (m - 1), eigenvector 0 omitted
  EmbeddingConvention convention = EmbeddingConvention::paper_literal;
  double t = 1.0;
  bool normalized = false;
};

struct BaseEmbeddingCoordinates {
  // N_B x m^2; entry (l, k) of fibre j at column l * m + k.
  Eigen::MatrixXd per_fibre;
  double t = 1.0;
};

// Weight of eigenvalue `lambda` under the convention, with 0^0 = 1.
double embedding_weight(double lambda, double t, EmbeddingConvention convention);

EmbeddingCoordinates hdm_embed(const SpectralResult& spec, double t,
                               EmbeddingConvention convention =
                                   EmbeddingConvention::paper_literal);

// Rows scaled to unit length. Throws InvalidArgument naming the first zero row.
EmbeddingCoordinates hdm_normalize(const EmbeddingCoordinates& coords);

double hdm_distance(const EmbeddingCoordinates& coords, std::size_t p, std::size_t q);

BaseEmbeddingCoordinates hbdm_embed(const SpectralResult& spec, double t);

double hbdm_distance(const BaseEmbeddingCoordinates& coords, std::size_t i,
                     std::size_t j);

}  // namespace hypolap
