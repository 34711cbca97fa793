#pragma once

#include <cstddef>
#include <vector>

#include "hypolap/types.hpp"

namespace hypolap {

struct Neighbor {
  std::size_t index;
  double sq_distance;
};

// k nearest neighbors of every point under Euclidean distance, excluding the
// point itself, sorted by (distance, index). Brute force.
std::vector<std::vector<Neighbor>> k_nearest(const PointCloud& points,
                                             std::size_t k);

// All points within Euclidean distance `radius` of column `j` (excluding j),
// sorted by (distance, index).
std::vector<Neighbor> radius_neighbors(const PointCloud& points, std::size_t j,
                                       double radius);

}  // namespace hypolap
