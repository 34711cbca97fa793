#pragma once

// Tangent-plane estimation by weighted local PCA and estimation of parallel
// transports between neighboring frames by orthogonal Procrustes alignment.

#include <cstddef>
#include <optional>
#include <vector>

#include "hypolap/neighbors.hpp"
#include "hypolap/types.hpp"

namespace hypolap::pca {

enum class WeightKernel {
  epanechnikov,  // (1 - u^2) on [0, 1]
  gaussian5,     // exp(-5 u^2) on [0, 1]
};

struct PcaConfig {
  double eps_pca = 0.0;          // squared length scale
  std::size_t k_neighbors = 10;  // neighbors considered before the radius cut
  WeightKernel weight_kernel = WeightKernel::epanechnikov;
  std::optional<std::size_t> target_dim;
  double gap_threshold = 0.5;    // relative singular-value gap for estimate_dimension
  // When positive, points with fewer in-radius neighbors widen their radius
  // to sqrt(2) times the distance of this nearest neighbor. 0 keeps the
  // fixed radius and reports sparse points as errors.
  std::size_t min_neighbors = 0;

  void validate() const;
};

struct TangentFrame {
  std::size_t base_index = 0;
  Eigen::MatrixXd basis;            // D x d, orthonormal columns
  Eigen::VectorXd singular_values;  // all singular values of X_j D_j, descending
};

// Estimated transport between coefficient spaces: coefficients at `from_index`
// are mapped to coefficients at `to_index` by `matrix`.
struct TransportEstimate {
  std::size_t from_index = 0;
  std::size_t to_index = 0;
  Eigen::MatrixXd matrix;
  double determinant = 1.0;
};

double weight_kernel(WeightKernel kernel, double u);

// Weighted local PCA at column j of `points`. `neighbors` must be the
// k-nearest list of j (sorted); pass an empty optional to compute it here.
// When cfg.target_dim is unset the frame keeps every singular direction and
// the caller truncates after estimate_dimension.
TangentFrame local_pca_frame(const PointCloud& points, std::size_t j,
                             const PcaConfig& cfg,
                             const std::vector<Neighbor>* neighbors = nullptr);

// Frames for every point. When cfg.target_dim is unset the dimension is
// estimated with estimate_dimension and applied to all frames.
std::vector<TangentFrame> estimate_frames(const PointCloud& points,
                                          const PcaConfig& cfg);

// Median over points of the smallest d with (s_d - s_{d+1}) / s_1 > threshold.
std::size_t estimate_dimension(const std::vector<Eigen::VectorXd>& singular_values,
                               double gap_threshold = 0.5);

// O = U V^T from the SVD of B_j^T B_i: maps coefficients at frame_i to
// coefficients at frame_j.
TransportEstimate procrustes_transport(const TangentFrame& frame_i,
                                       const TangentFrame& frame_j);

// tau = B c.
Eigen::VectorXd lift_coefficients(const TangentFrame& frame,
                                  const Eigen::VectorXd& c);

// Max over a fixed set of unit coefficient vectors c of
// |B_j O c - P_{xi_j, xi_i}(B_i c)| with the exact S^2 transport. Coincident
// base points use the identity transport.
double transport_estimation_error(const Vec3& xi_i, const Vec3& xi_j,
                                  const TangentFrame& frame_i,
                                  const TangentFrame& frame_j,
                                  const TransportEstimate& estimate);

}  // namespace hypolap::pca
