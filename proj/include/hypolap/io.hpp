#pragma once

// Text and binary persistence for samples, frames, transports, weight
// matrices, spectra and embeddings. Reals are written with 17 significant
// digits so that text files round-trip exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "hypolap/afap.hpp"
#include "hypolap/block_matrix.hpp"
#include "hypolap/bundle_graph.hpp"
#include "hypolap/embedding.hpp"
#include "hypolap/spectral.hpp"
#include "hypolap/tangent_pca.hpp"

namespace hypolap::io {

namespace fs = std::filesystem;

std::string format_real(double x);

// Whole-file helpers; throw IoError naming the path.
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& contents);

// Rows `x y z`.
void write_points(const fs::path& path, const PointCloud& points);
PointCloud read_points(const fs::path& path);

// Rows `j x y z vx vy vz` (exact mode).
void write_bundle(const fs::path& path, const bundle::BundleSampleSet& samples);
bundle::BundleSampleSet read_bundle(const fs::path& path);

// Rows `j c1 ... cd` (empirical mode); base points come from a separate file.
void write_coefficients(const fs::path& path, const bundle::BundleSampleSet& samples);
bundle::BundleSampleSet read_coefficients(const fs::path& path, const PointCloud& base);

// Rows `j b11 b21 b31 b12 b22 b32` (basis columns in order).
void write_frames(const fs::path& path, const std::vector<pca::TangentFrame>& frames);
std::vector<pca::TangentFrame> read_frames(const fs::path& path);

// Rows `i j o11 o12 o21 o22`: the matrix maps coefficients at j to
// coefficients at i. One row per edge with i > j.
void write_transports(const fs::path& path, const bundle::EdgeTransports& transports);
bundle::EdgeTransports read_transports(const fs::path& path);

// Header `n nnz`, then `row col value` sorted by (row, col). Block offsets
// are not part of the text format.
void write_matrix_text(const fs::path& path, const BlockSparseMatrix& w);
BlockSparseMatrix read_matrix_text(const fs::path& path,
                                   std::vector<std::size_t> block_offsets);

// Binary twin carrying the block offsets as well.
void write_matrix_binary(const fs::path& path, const BlockSparseMatrix& w);
BlockSparseMatrix read_matrix_binary(const fs::path& path);

// One value per line.
void write_vector(const fs::path& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const fs::path& path);

// `index,eigenvalue,residual`.
void write_eigenvalues_csv(const fs::path& path, const SpectralResult& spec);
std::vector<double> read_eigenvalues_csv(const fs::path& path);

void write_spectrum_binary(const fs::path& path, const SpectralResult& spec);
SpectralResult read_spectrum_binary(const fs::path& path);

std::string cluster_report_json(const ClusterReport& report, double rel_gap);

// `j,s,coord_1,...`.
void write_hdm_csv(const fs::path& path, const EmbeddingCoordinates& coords,
                   const std::vector<std::size_t>& block_offsets);
EmbeddingCoordinates read_hdm_csv(const fs::path& path);

// `j,entry_11,entry_12,...`.
void write_hbdm_csv(const fs::path& path, const BaseEmbeddingCoordinates& coords);

// Rows `k base_x base_y base_z vx vy vz angle_error`; angle_error is nan
// when no exact reference exists for the fibre.
// `vectors` holds one ambient tangent vector per fibre as columns.
void write_section(const fs::path& path, const PointCloud& base,
                   const Eigen::MatrixXd& vectors,
                   const std::vector<double>& angle_errors);

}  // namespace hypolap::io
