#pragma once

// Exact geometry of the unit sphere S^2 in R^3 and of its unit tangent
// bundle: sampling, geodesics, the exponential map and parallel transport.

#include <cstddef>
#include <vector>

#include "hypolap/types.hpp"

namespace hypolap::geometry {

inline constexpr double kUnitTolerance = 1e-12;

// A unit vector tangent to S^2 at `base`.
struct UnitTangent {
  Vec3 base;
  Vec3 vector;
};

enum class FibreSampling { random, equispaced };

bool on_sphere(const Vec3& p, double tol = kUnitTolerance);
bool is_unit_tangent(const UnitTangent& t, double tol = kUnitTolerance);

// i.i.d. uniform points on S^2 (normalized standard normals).
std::vector<Vec3> sample_sphere_uniform(std::size_t n, RngSeed seed);

// Deterministic orthonormal frame (columns) of the tangent plane at `base`.
// The first column is the projection of the coordinate axis least aligned
// with `base`; the second completes a right-handed frame with base.
Eigen::Matrix<double, 3, 2> tangent_frame(const Vec3& base);

// Unit tangents at `base`: uniform on the fibre circle (random) or at angles
// 2*pi*k/n measured from tangent_frame(base) (equispaced).
std::vector<UnitTangent> sample_fibre_circle(const Vec3& base, std::size_t n,
                                             FibreSampling mode, RngSeed seed);

// arccos of the clamped inner product, in [0, pi].
double geodesic_distance(const Vec3& x, const Vec3& y);

// exp_x(v) = cos|v| x + sin|v| v/|v|. Throws GeometryError if v is not
// tangent at x.
Vec3 exp_map(const Vec3& x, const Vec3& v);

// Rotation about the axis x cross y taking x to y. Restricted to T_x S^2 it
// is the parallel transport along the minimizing geodesic. Throws
// GeometryError when x and y are coincident or antipodal.
Mat3 transport_rotation(const Vec3& x, const Vec3& y);

// Parallel transport of v in T_x S^2 to T_y S^2.
Vec3 parallel_transport(const Vec3& x, const Vec3& y, const Vec3& v);

// Convert a list of points to a 3 x n point cloud.
PointCloud to_cloud(const std::vector<Vec3>& points);

}  // namespace hypolap::geometry
