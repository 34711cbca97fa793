#include "hypolap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hypolap/errors.hpp"

namespace hypolap::geometry {

namespace {

// Transport endpoints closer than this (in sin of the angle) are degenerate.
constexpr double kAxisTolerance = 1e-12;

}  // namespace

bool on_sphere(const Vec3& p, double tol) {
  return std::abs(p.norm() - 1.0) <= tol;
}

bool is_unit_tangent(const UnitTangent& t, double tol) {
  return on_sphere(t.base, tol) && std::abs(t.vector.norm() - 1.0) <= tol &&
         std::abs(t.vector.dot(t.base)) <= tol;
}

std::vector<Vec3> sample_sphere_uniform(std::size_t n, RngSeed seed) {
  std::mt19937_64 rng(seed.value);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> points;
  points.reserve(n);
  while (points.size() < n) {
    Vec3 g(normal(rng), normal(rng), normal(rng));
    const double r = g.norm();
    if (r < 1e-300) continue;
    points.emplace_back(g / r);
  }
  return points;
}

Eigen::Matrix<double, 3, 2> tangent_frame(const Vec3& base) {
  Eigen::Index axis = 0;
  base.cwiseAbs().minCoeff(&axis);
  Vec3 a = Vec3::Unit(axis);
  Vec3 e1 = (a - a.dot(base) * base).normalized();
  Vec3 e2 = base.cross(e1).normalized();
  Eigen::Matrix<double, 3, 2> frame;
  frame.col(0) = e1;
  frame.col(1) = e2;
  return frame;
}

std::vector<UnitTangent> sample_fibre_circle(const Vec3& base, std::size_t n,
                                             FibreSampling mode, RngSeed seed) {
  const Eigen::Matrix<double, 3, 2> frame = tangent_frame(base);
  std::mt19937_64 rng(seed.value);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<UnitTangent> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = mode == FibreSampling::equispaced
                         ? 2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(n)
                         : angle(rng);
    Vec3 v = std::cos(a) * frame.col(0) + std::sin(a) * frame.col(1);
    // Re-project so the tangency and unit-length invariants hold to rounding.
    v -= v.dot(base) * base;
    out.push_back({base, v.normalized()});
  }
  return out;
}

double geodesic_distance(const Vec3& x, const Vec3& y) {
  return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

Vec3 exp_map(const Vec3& x, const Vec3& v) {
  const double len = v.norm();
  if (std::abs(v.dot(x)) > 1e-10 * std::max(1.0, len)) {
    throw GeometryError("exp_map: vector is not tangent at the base point");
  }
  if (len == 0.0) return x;
  Vec3 y = std::cos(len) * x + std::sin(len) * (v / len);
  return y.normalized();
}

Mat3 transport_rotation(const Vec3& x, const Vec3& y) {
  const Vec3 axis = x.cross(y);
  const double s = axis.norm();
  const double c = x.dot(y);
  if (s < kAxisTolerance) {
    throw GeometryError(
        "parallel transport: endpoints are coincident or antipodal");
  }
  // R = c I + [a]_x + a a^T / (1 + c), with a = x cross y (unnormalized).
  Mat3 cross;
  cross << 0.0, -axis.z(), axis.y(),
           axis.z(), 0.0, -axis.x(),
          -axis.y(), axis.x(), 0.0;
  Mat3 r = c * Mat3::Identity() + cross;
  if (c > -0.5) {
    r += (axis * axis.transpose()) / (1.0 + c);
  } else {
    // Near-antipodal: (1 - c) / s^2 = 1 / (1 + c) avoids the cancellation.
    const Vec3 k = axis / s;
    r = c * Mat3::Identity() + cross + (1.0 - c) * (k * k.transpose());
  }
  return r;
}

Vec3 parallel_transport(const Vec3& x, const Vec3& y, const Vec3& v) {
  if (std::abs(v.dot(x)) > 1e-10 * std::max(1.0, v.norm())) {
    throw GeometryError(
        "parallel transport: vector is not tangent at the start point");
  }
  return transport_rotation(x, y) * v;
}

PointCloud to_cloud(const std::vector<Vec3>& points) {
  PointCloud cloud(3, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    cloud.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  return cloud;
}

}  // namespace hypolap::geometry
