#pragma once

// Base affinity graphs and assembly of the fibre-blocked weight matrix, from
// exact tangent samples on S^2 or from coefficient samples with estimated
// frames and transports.

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hypolap/block_matrix.hpp"
#include "hypolap/geometry.hpp"
#include "hypolap/tangent_pca.hpp"
#include "hypolap/types.hpp"

namespace hypolap::bundle {

enum class SampleMode { exact, empirical };

// Base points plus per-fibre samples. In exact mode fibres[j] is 3 x kappa_j
// with unit tangents at base point j as columns; in empirical mode it is
// d x kappa_j with unit coefficient vectors relative to an estimated frame.
struct BundleSampleSet {
  SampleMode mode = SampleMode::exact;
  PointCloud base;
  std::vector<Eigen::MatrixXd> fibres;

  std::size_t num_fibres() const { return fibres.size(); }
  std::vector<std::size_t> fibre_sizes() const;
  // Prefix sums of fibre sizes with a trailing total.
  std::vector<std::size_t> block_offsets() const;
  std::size_t total_size() const;
  void validate() const;
};

BundleSampleSet sample_exact_bundle(std::size_t n_base, std::size_t n_fibre,
                                    geometry::FibreSampling mode, RngSeed seed);

// Uniform base points and unit coefficient vectors on the circle in R^2.
BundleSampleSet sample_empirical_bundle(std::size_t n_base, std::size_t n_fibre,
                                        RngSeed seed);

// Exact-mode view of empirical samples: each coefficient vector is lifted
// with its frame, projected onto the true tangent plane of the base point and
// normalized.
BundleSampleSet lift_to_tangents(const BundleSampleSet& samples,
                                 const std::vector<pca::TangentFrame>& frames);

struct NeighborGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> adjacency;  // sorted, no self loops

  std::size_t num_edges() const;
  std::size_t num_components() const;
  bool connected() const { return num_components() <= 1; }
  bool is_symmetric() const;
};

// Mutual k-nearest-neighbor graph under ambient Euclidean distance. The
// result may be disconnected; callers check connected().
NeighborGraph build_base_knn(const PointCloud& points, std::size_t k_base);

enum class KernelFamily {
  gaussian_product,  // exp(-(a + b))
  compact_product,   // k(a) k(b), k(u) = (1 - u)^2 on [0, 1]
};

// Distance between transported fibre samples: ambient chord or arc length.
enum class FibreMetric { chordal, geodesic };

struct KernelConfig {
  double eps = 0.2;
  double delta = 0.015;
  std::size_t k_base = 60;
  std::size_t k_fibre = 16;
  KernelFamily family = KernelFamily::gaussian_product;
  double alpha = 1.0;
  FibreMetric fibre_metric = FibreMetric::chordal;

  void validate() const;
};

// Kernel profile at a = base_sq / eps and b = fibre_sq / delta.
double kernel_profile(KernelFamily family, double a, double b);

// Squared fibre distance between two unit vectors under the configured metric.
double fibre_sq_distance(FibreMetric metric, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v);

// Weight between sample r of fibre i (base xi_i, tangent x_ir) and sample s
// of fibre j, with exact transport from xi_i to xi_j. Throws for i == j.
double kernel_entry_exact(std::size_t i, std::size_t j, const Vec3& xi_i,
                          const Vec3& xi_j, const Vec3& x_ir, const Vec3& x_js,
                          const KernelConfig& cfg);

// Same with coefficient samples and an estimated transport o_ji taking
// coefficients at i to coefficients at j.
double kernel_entry_empirical(std::size_t i, std::size_t j, const Vec3& xi_i,
                              const Vec3& xi_j, const Eigen::VectorXd& c_ir,
                              const Eigen::VectorXd& c_js,
                              const Eigen::MatrixXd& o_ji,
                              const KernelConfig& cfg);

// Estimated transports for the edges of a base graph, stored once per
// unordered edge in the direction smaller index -> larger index.
class EdgeTransports {
 public:
  void insert(std::size_t from, std::size_t to, Eigen::MatrixXd matrix);
  // Matrix mapping coefficients at `from` to coefficients at `to`; throws
  // AssemblyError when the edge is missing.
  Eigen::MatrixXd get(std::size_t from, std::size_t to) const;
  bool contains(std::size_t a, std::size_t b) const;
  std::size_t size() const { return table_.size(); }

  struct Entry {
    std::size_t from;  // smaller index
    std::size_t to;
    Eigen::MatrixXd matrix;
  };
  // All stored transports sorted by (from, to).
  std::vector<Entry> entries() const;

 private:
  static std::uint64_t key(std::size_t a, std::size_t b);
  std::unordered_map<std::uint64_t, Eigen::MatrixXd> table_;
};

EdgeTransports estimate_edge_transports(const std::vector<pca::TangentFrame>& frames,
                                        const NeighborGraph& graph);

// Mutual k-nearest mask over a kappa_i x kappa_j distance table: entry (r, s)
// is kept when s is among the k nearest of r and r among the k nearest of s.
// Ties go to the smaller index.
std::vector<std::pair<std::uint32_t, std::uint32_t>> mutual_knn_pairs(
    const Eigen::MatrixXd& sq_distances, std::size_t k);

// Assemble W. Exact mode uses exact transports; empirical mode needs a
// transport for every graph edge.
BlockSparseMatrix assemble_block_matrix(const BundleSampleSet& samples,
                                        const NeighborGraph& graph,
                                        const KernelConfig& cfg,
                                        const EdgeTransports* transports = nullptr);

}  // namespace hypolap::bundle
