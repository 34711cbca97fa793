#include "hypolap/neighbors.hpp"

#include <algorithm>

#include "hypolap/errors.hpp"

namespace hypolap {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.sq_distance < b.sq_distance ||
         (a.sq_distance == b.sq_distance && a.index < b.index);
}

}  // namespace

std::vector<std::vector<Neighbor>> k_nearest(const PointCloud& points,
                                             std::size_t k) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (k >= n) {
    throw_invalid("k_nearest: k must be smaller than the number of points");
  }
  std::vector<std::vector<Neighbor>> out(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    std::vector<Neighbor> cand;
    cand.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const double d = (points.col(static_cast<Eigen::Index>(i)) -
                        points.col(static_cast<Eigen::Index>(j)))
                           .squaredNorm();
      cand.push_back({i, d});
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k),
                      cand.end(), closer);
    cand.resize(k);
    out[j] = std::move(cand);
  }
  return out;
}

std::vector<Neighbor> radius_neighbors(const PointCloud& points, std::size_t j,
                                       double radius) {
  std::vector<Neighbor> out;
  const double r2 = radius * radius;
  const auto col = points.col(static_cast<Eigen::Index>(j));
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (static_cast<std::size_t>(i) == j) continue;
    const double d = (points.col(i) - col).squaredNorm();
    if (d <= r2) out.push_back({static_cast<std::size_t>(i), d});
  }
  std::sort(out.begin(), out.end(), closer);
  return out;
}

}  // namespace hypolap
