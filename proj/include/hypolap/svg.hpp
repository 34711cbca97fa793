#pragma once

// Static SVG plots: eigenvalue bar charts and tangent-vector quivers on an
// orthographic view of the sphere.

#include <string>
#include <vector>

#include "hypolap/types.hpp"

namespace hypolap::svg {

std::string spectrum_bars(const std::vector<double>& eigenvalues, const std::string& title);

// Arrows for the vectors whose base points face the viewer along `view`.
std::string sphere_quiver(const PointCloud& base, const Eigen::MatrixXd& vectors,
                          const Vec3& view, const std::string& title);

}  // namespace hypolap::svg
