#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace hypolap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Column-per-point cloud in an ambient space of dimension rows().
using PointCloud = Eigen::MatrixXd;

struct RngSeed {
  std::uint64_t value = 0;
};

// Independent random streams are derived from one run seed. Each stage uses
// a fixed stream tag, and per-item streams (e.g. one per fibre) are derived
// again from the stage seed with the item index as tag.
enum class Stream : std::uint64_t {
  base_points = 1,
  fibre_samples = 2,
  solver_start = 4,
  probes = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline RngSeed derive_seed(RngSeed seed, std::uint64_t tag) {
  return RngSeed{splitmix64(seed.value ^ splitmix64(tag + 0x632be59bd9b4e019ULL))};
}

inline RngSeed derive_seed(RngSeed seed, Stream stream) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace hypolap
