#include "hypolap/tangent_pca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hypolap/errors.hpp"
#include "hypolap/geometry.hpp"

namespace hypolap::pca {

void PcaConfig::validate() const {
  if (!(eps_pca > 0.0)) throw_invalid("PcaConfig: eps_pca must be positive");
  if (k_neighbors < 1) throw_invalid("PcaConfig: k_neighbors must be >= 1");
  if (target_dim && *target_dim < 1) {
    throw_invalid("PcaConfig: target_dim must be >= 1");
  }
}

double weight_kernel(WeightKernel kernel, double u) {
  if (u < 0.0 || u > 1.0) return 0.0;
  switch (kernel) {
    case WeightKernel::epanechnikov:
      return 1.0 - u * u;
    case WeightKernel::gaussian5:
      return std::exp(-5.0 * u * u);
  }
  return 0.0;
}

TangentFrame local_pca_frame(const PointCloud& points, std::size_t j,
                             const PcaConfig& cfg,
                             const std::vector<Neighbor>* neighbors) {
  cfg.validate();
  std::vector<Neighbor> own;
  if (neighbors == nullptr) {
    const auto n = static_cast<std::size_t>(points.cols());
    own = k_nearest(points, std::min(cfg.k_neighbors, n - 1))[j];
    neighbors = &own;
  }
  double scale = std::sqrt(cfg.eps_pca);
  if (cfg.min_neighbors > 0) {
    const std::size_t want = std::min(cfg.min_neighbors, neighbors->size());
    std::size_t inside = 0;
    while (inside < neighbors->size() && (*neighbors)[inside].sq_distance < cfg.eps_pca) {
      ++inside;
    }
    if (want > 0 && inside < want) {
      scale = std::max(scale, std::sqrt(2.0 * (*neighbors)[want - 1].sq_distance));
    }
  }
  const auto center = points.col(static_cast<Eigen::Index>(j));

  // Columns (xi_k - xi_j) * sqrt(K(|xi_k - xi_j| / sqrt(eps))) for the k
  // nearest neighbors inside the kernel support.
  std::vector<Eigen::VectorXd> cols;
  const std::size_t limit = std::min(cfg.k_neighbors, neighbors->size());
  for (std::size_t a = 0; a < limit; ++a) {
    const Neighbor& nb = (*neighbors)[a];
    const double w =
        weight_kernel(cfg.weight_kernel, std::sqrt(nb.sq_distance) / scale);
    if (w <= 0.0) continue;
    cols.push_back((points.col(static_cast<Eigen::Index>(nb.index)) - center) *
                   std::sqrt(w));
  }
  const std::size_t d = cfg.target_dim.value_or(1);
  if (cols.size() < d) {
    throw FrameEstimationError("local PCA at point " + std::to_string(j) +
                               ": " + std::to_string(cols.size()) +
                               " usable neighbors, need " + std::to_string(d));
  }
  Eigen::MatrixXd xd(points.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < cols.size(); ++a) {
    xd.col(static_cast<Eigen::Index>(a)) = cols[a];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xd, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) {
    throw FrameEstimationError("local PCA at point " + std::to_string(j) +
                               ": all weighted neighbor offsets vanish");
  }
  const auto keep = static_cast<Eigen::Index>(
      cfg.target_dim ? *cfg.target_dim : static_cast<std::size_t>(sv.size()));
  if (keep > svd.matrixU().cols()) {
    throw FrameEstimationError("local PCA at point " + std::to_string(j) +
                               ": rank too small for the target dimension");
  }
  TangentFrame frame;
  frame.base_index = j;
  frame.basis = svd.matrixU().leftCols(keep);
  frame.singular_values = sv;
  return frame;
}

std::vector<TangentFrame> estimate_frames(const PointCloud& points,
                                          const PcaConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(points.cols());
  if (n < 2) throw FrameEstimationError("local PCA needs at least two points");
  const auto knn = k_nearest(points, std::min(cfg.k_neighbors, n - 1));
  std::vector<TangentFrame> frames(n);
  // Without a target dimension the frames keep every direction until the
  // dimension estimate is known.
  for (std::size_t j = 0; j < n; ++j) {
    frames[j] = local_pca_frame(points, j, cfg, &knn[j]);
  }
  if (!cfg.target_dim) {
    std::vector<Eigen::VectorXd> svs;
    svs.reserve(n);
    for (const auto& f : frames) svs.push_back(f.singular_values);
    const std::size_t d = estimate_dimension(svs, cfg.gap_threshold);
    for (auto& f : frames) {
      if (f.basis.cols() < static_cast<Eigen::Index>(d)) {
        throw FrameEstimationError(
            "local PCA at point " + std::to_string(f.base_index) +
            ": fewer usable neighbors than the estimated dimension");
      }
      f.basis = f.basis.leftCols(static_cast<Eigen::Index>(d)).eval();
    }
  }
  return frames;
}

std::size_t estimate_dimension(const std::vector<Eigen::VectorXd>& singular_values,
                               double gap_threshold) {
  if (singular_values.empty()) {
    throw_invalid("estimate_dimension: no singular value lists");
  }
  std::vector<std::size_t> dims;
  dims.reserve(singular_values.size());
  for (std::size_t p = 0; p < singular_values.size(); ++p) {
    const Eigen::VectorXd& s = singular_values[p];
    if (s.size() == 0 || s(0) <= 0.0) {
      throw FrameEstimationError("estimate_dimension: all singular values are "
                                 "zero at point " + std::to_string(p));
    }
    auto dim = static_cast<std::size_t>(s.size());
    for (Eigen::Index d = 1; d <= s.size(); ++d) {
      const double next = d < s.size() ? s(d) : 0.0;
      if ((s(d - 1) - next) / s(0) > gap_threshold) {
        dim = static_cast<std::size_t>(d);
        break;
      }
    }
    dims.push_back(dim);
  }
  // Lower median.
  const auto mid = dims.begin() + static_cast<std::ptrdiff_t>((dims.size() - 1) / 2);
  std::nth_element(dims.begin(), mid, dims.end());
  return *mid;
}

TransportEstimate procrustes_transport(const TangentFrame& frame_i,
                                       const TangentFrame& frame_j) {
  if (frame_i.basis.cols() != frame_j.basis.cols() ||
      frame_i.basis.rows() != frame_j.basis.rows()) {
    throw_invalid("procrustes_transport: frames differ in shape");
  }
  const Eigen::MatrixXd m = frame_j.basis.transpose() * frame_i.basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < 1e-12) {
    throw AlignmentError("procrustes_transport: B_j^T B_i is rank deficient "
                         "between points " + std::to_string(frame_i.base_index) +
                         " and " + std::to_string(frame_j.base_index));
  }
  TransportEstimate out;
  out.from_index = frame_i.base_index;
  out.to_index = frame_j.base_index;
  out.matrix = svd.matrixU() * svd.matrixV().transpose();
  out.determinant = out.matrix.determinant();
  return out;
}

Eigen::VectorXd lift_coefficients(const TangentFrame& frame,
                                  const Eigen::VectorXd& c) {
  if (c.size() != frame.basis.cols()) {
    throw_invalid("lift_coefficients: coefficient dimension mismatch");
  }
  return frame.basis * c;
}

double transport_estimation_error(const Vec3& xi_i, const Vec3& xi_j,
                                  const TangentFrame& frame_i,
                                  const TangentFrame& frame_j,
                                  const TransportEstimate& estimate) {
  if (frame_i.basis.rows() != 3 || frame_i.basis.cols() != 2 ||
      frame_j.basis.rows() != 3 || frame_j.basis.cols() != 2) {
    throw_invalid("transport_estimation_error: needs 3x2 frames on S^2");
  }
  Mat3 rotation = Mat3::Identity();
  if (xi_i.cross(xi_j).norm() >= 1e-12) {
    rotation = geometry::transport_rotation(xi_i, xi_j);
  } else if (xi_i.dot(xi_j) < 0.0) {
    throw GeometryError("transport_estimation_error: antipodal base points");
  }
  constexpr int kProbes = 16;
  double worst = 0.0;
  for (int k = 0; k < kProbes; ++k) {
    const double a = 2.0 * std::numbers::pi * k / kProbes;
    const Eigen::Vector2d c(std::cos(a), std::sin(a));
    const Vec3 estimated = frame_j.basis * (estimate.matrix * c);
    const Vec3 exact = rotation * (frame_i.basis * c);
    worst = std::max(worst, (estimated - exact).norm());
  }
  return worst;
}

}  // namespace hypolap::pca
