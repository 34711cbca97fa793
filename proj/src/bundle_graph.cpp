#include "hypolap/bundle_graph.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "hypolap/errors.hpp"
#include "hypolap/neighbors.hpp"

namespace hypolap::bundle {

std::vector<std::size_t> BundleSampleSet::fibre_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(fibres.size());
  for (const auto& f : fibres) sizes.push_back(static_cast<std::size_t>(f.cols()));
  return sizes;
}

std::vector<std::size_t> BundleSampleSet::block_offsets() const {
  std::vector<std::size_t> offsets(fibres.size() + 1, 0);
  for (std::size_t j = 0; j < fibres.size(); ++j) {
    offsets[j + 1] = offsets[j] + static_cast<std::size_t>(fibres[j].cols());
  }
  return offsets;
}

std::size_t BundleSampleSet::total_size() const { return block_offsets().back(); }

void BundleSampleSet::validate() const {
  if (static_cast<std::size_t>(base.cols()) != fibres.size()) {
    throw_invalid("bundle samples: base point count differs from fibre count");
  }
  if (base.cols() > 0 && base.rows() != 3) {
    throw_invalid("bundle samples: base points must be 3-vectors");
  }
  constexpr double tol = 1e-12;
  for (std::size_t j = 0; j < fibres.size(); ++j) {
    const Vec3 xi = base.col(static_cast<Eigen::Index>(j));
    if (!geometry::on_sphere(xi, tol)) {
      throw_invalid("bundle samples: base point " + std::to_string(j) +
                    " is not on the unit sphere");
    }
    const Eigen::MatrixXd& f = fibres[j];
    if (mode == SampleMode::exact && f.cols() > 0 && f.rows() != 3) {
      throw_invalid("bundle samples: exact fibre samples must be 3-vectors");
    }
    for (Eigen::Index s = 0; s < f.cols(); ++s) {
      if (std::abs(f.col(s).norm() - 1.0) > tol) {
        throw_invalid("bundle samples: sample " + std::to_string(s) +
                      " of fibre " + std::to_string(j) + " is not unit length");
      }
      if (mode == SampleMode::exact && std::abs(f.col(s).dot(xi)) > tol) {
        throw_invalid("bundle samples: sample " + std::to_string(s) +
                      " of fibre " + std::to_string(j) + " is not tangent");
      }
    }
  }
}

BundleSampleSet sample_exact_bundle(std::size_t n_base, std::size_t n_fibre,
                                    geometry::FibreSampling mode, RngSeed seed) {
  BundleSampleSet out;
  out.mode = SampleMode::exact;
  out.base = geometry::to_cloud(
      geometry::sample_sphere_uniform(n_base, derive_seed(seed, Stream::base_points)));
  const RngSeed fibre_seed = derive_seed(seed, Stream::fibre_samples);
  out.fibres.resize(n_base);
  for (std::size_t j = 0; j < n_base; ++j) {
    const Vec3 xi = out.base.col(static_cast<Eigen::Index>(j));
    const auto tangents =
        geometry::sample_fibre_circle(xi, n_fibre, mode, derive_seed(fibre_seed, j));
    Eigen::MatrixXd f(3, static_cast<Eigen::Index>(n_fibre));
    for (std::size_t s = 0; s < n_fibre; ++s) {
      f.col(static_cast<Eigen::Index>(s)) = tangents[s].vector;
    }
    out.fibres[j] = std::move(f);
  }
  return out;
}

BundleSampleSet sample_empirical_bundle(std::size_t n_base, std::size_t n_fibre,
                                        RngSeed seed) {
  BundleSampleSet out;
  out.mode = SampleMode::empirical;
  out.base = geometry::to_cloud(
      geometry::sample_sphere_uniform(n_base, derive_seed(seed, Stream::base_points)));
  const RngSeed fibre_seed = derive_seed(seed, Stream::fibre_samples);
  out.fibres.resize(n_base);
  for (std::size_t j = 0; j < n_base; ++j) {
    std::mt19937_64 rng(derive_seed(fibre_seed, j).value);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    Eigen::MatrixXd f(2, static_cast<Eigen::Index>(n_fibre));
    for (std::size_t s = 0; s < n_fibre; ++s) {
      const double a = angle(rng);
      f.col(static_cast<Eigen::Index>(s)) = Eigen::Vector2d(std::cos(a), std::sin(a));
    }
    out.fibres[j] = std::move(f);
  }
  return out;
}

BundleSampleSet lift_to_tangents(const BundleSampleSet& samples,
                                 const std::vector<pca::TangentFrame>& frames) {
  if (samples.mode != SampleMode::empirical) {
    throw_invalid("lift_to_tangents expects coefficient samples");
  }
  if (frames.size() != samples.num_fibres()) {
    throw_invalid("lift_to_tangents: one frame per fibre required");
  }
  BundleSampleSet out;
  out.mode = SampleMode::exact;
  out.base = samples.base;
  out.fibres.resize(samples.num_fibres());
  for (std::size_t j = 0; j < samples.num_fibres(); ++j) {
    const Vec3 xi = samples.base.col(static_cast<Eigen::Index>(j));
    Eigen::MatrixXd lifted = frames[j].basis * samples.fibres[j];
    if (lifted.rows() != 3) throw_invalid("lift_to_tangents: frames must be 3 x d");
    for (Eigen::Index s = 0; s < lifted.cols(); ++s) {
      Vec3 v = lifted.col(s);
      v -= v.dot(xi) * xi;
      const double norm = v.norm();
      if (!(norm > 0.0)) {
        throw GeometryError("lifted sample " + std::to_string(s) + " of fibre " +
                            std::to_string(j) + " is normal to the sphere");
      }
      lifted.col(s) = v / norm;
    }
    out.fibres[j] = std::move(lifted);
  }
  return out;
}

std::size_t NeighborGraph::num_edges() const {
  std::size_t total = 0;
  for (const auto& a : adjacency) total += a.size();
  return total / 2;
}

std::size_t NeighborGraph::num_components() const {
  std::vector<std::size_t> label(n, n);
  std::size_t components = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (label[start] != n) continue;
    label[start] = components;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : adjacency[v]) {
        if (label[w] == n) {
          label[w] = components;
          stack.push_back(w);
        }
      }
    }
    ++components;
  }
  return components;
}

bool NeighborGraph::is_symmetric() const {
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w : adjacency[v]) {
      if (w == v) return false;
      if (!std::binary_search(adjacency[w].begin(), adjacency[w].end(), v)) return false;
    }
  }
  return true;
}

NeighborGraph build_base_knn(const PointCloud& points, std::size_t k_base) {
  const auto n = static_cast<std::size_t>(points.cols());
  if (k_base < 1) throw_invalid("build_base_knn: k_base must be >= 1");
  if (k_base >= n) throw_invalid("build_base_knn: k_base must be below the point count");
  const auto knn = k_nearest(points, k_base);
  std::vector<std::vector<std::size_t>> near(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& nb : knn[v]) near[v].push_back(nb.index);
    std::sort(near[v].begin(), near[v].end());
  }
  NeighborGraph g;
  g.n = n;
  g.adjacency.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w : near[v]) {
      if (std::binary_search(near[w].begin(), near[w].end(), v)) {
        g.adjacency[v].push_back(w);
      }
    }
  }
  return g;
}

void KernelConfig::validate() const {
  if (!(eps > 0.0)) throw_invalid("KernelConfig: eps must be positive");
  if (!(delta > 0.0)) throw_invalid("KernelConfig: delta must be positive");
  if (k_base < 1) throw_invalid("KernelConfig: k_base must be >= 1");
  if (k_fibre < 1) throw_invalid("KernelConfig: k_fibre must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw_invalid("KernelConfig: alpha must lie in [0, 1]");
}

double kernel_profile(KernelFamily family, double a, double b) {
  switch (family) {
    case KernelFamily::gaussian_product:
      return std::exp(-(a + b));
    case KernelFamily::compact_product: {
      if (a >= 1.0 || b >= 1.0) return 0.0;
      const double ka = (1.0 - a) * (1.0 - a);
      const double kb = (1.0 - b) * (1.0 - b);
      return ka * kb;
    }
  }
  return 0.0;
}

double fibre_sq_distance(FibreMetric metric, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& v) {
  const double chord_sq = (u - v).squaredNorm();
  if (metric == FibreMetric::chordal) return chord_sq;
  // Arc length on the unit circle from the chord length.
  const double arc = 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(chord_sq)));
  return arc * arc;
}

namespace {

void check_distinct(std::size_t i, std::size_t j) {
  if (i == j) {
    throw_invalid("kernel entry requested inside diagonal block " + std::to_string(i));
  }
}

}  // namespace

double kernel_entry_exact(std::size_t i, std::size_t j, const Vec3& xi_i,
                          const Vec3& xi_j, const Vec3& x_ir, const Vec3& x_js,
                          const KernelConfig& cfg) {
  check_distinct(i, j);
  const double a = (xi_i - xi_j).squaredNorm() / cfg.eps;
  if (cfg.family == KernelFamily::compact_product && a >= 1.0) return 0.0;
  const Vec3 moved = geometry::transport_rotation(xi_i, xi_j) * x_ir;
  const double b = fibre_sq_distance(cfg.fibre_metric, moved, x_js) / cfg.delta;
  return kernel_profile(cfg.family, a, b);
}

double kernel_entry_empirical(std::size_t i, std::size_t j, const Vec3& xi_i,
                              const Vec3& xi_j, const Eigen::VectorXd& c_ir,
                              const Eigen::VectorXd& c_js,
                              const Eigen::MatrixXd& o_ji,
                              const KernelConfig& cfg) {
  check_distinct(i, j);
  if (o_ji.cols() != c_ir.size() || o_ji.rows() != c_js.size()) {
    throw_invalid("kernel_entry_empirical: transport shape mismatch");
  }
  const double a = (xi_i - xi_j).squaredNorm() / cfg.eps;
  const double b = fibre_sq_distance(cfg.fibre_metric, o_ji * c_ir, c_js) / cfg.delta;
  return kernel_profile(cfg.family, a, b);
}

std::uint64_t EdgeTransports::key(std::size_t a, std::size_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

void EdgeTransports::insert(std::size_t from, std::size_t to, Eigen::MatrixXd matrix) {
  if (from == to) throw_invalid("EdgeTransports: self edge");
  if (from < to) {
    table_[key(from, to)] = std::move(matrix);
  } else {
    table_[key(to, from)] = matrix.transpose();
  }
}

bool EdgeTransports::contains(std::size_t a, std::size_t b) const {
  return table_.count(key(std::min(a, b), std::max(a, b))) > 0;
}

Eigen::MatrixXd EdgeTransports::get(std::size_t from, std::size_t to) const {
  const auto it = table_.find(key(std::min(from, to), std::max(from, to)));
  if (it == table_.end()) {
    throw AssemblyError("no estimated transport for base edge (" +
                        std::to_string(from) + ", " + std::to_string(to) + ")");
  }
  if (from < to) return it->second;
  return it->second.transpose();
}

std::vector<EdgeTransports::Entry> EdgeTransports::entries() const {
  std::vector<Entry> out;
  out.reserve(table_.size());
  for (const auto& [k, m] : table_) {
    out.push_back({static_cast<std::size_t>(k >> 32),
                   static_cast<std::size_t>(k & 0xffffffffULL), m});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    return a.from < b.from || (a.from == b.from && a.to < b.to);
  });
  return out;
}

EdgeTransports estimate_edge_transports(const std::vector<pca::TangentFrame>& frames,
                                        const NeighborGraph& graph) {
  if (frames.size() != graph.n) {
    throw_invalid("estimate_edge_transports: frame count differs from graph size");
  }
  EdgeTransports out;
  for (std::size_t i = 0; i < graph.n; ++i) {
    for (std::size_t j : graph.adjacency[i]) {
      if (j <= i) continue;
      out.insert(i, j, pca::procrustes_transport(frames[i], frames[j]).matrix);
    }
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> mutual_knn_pairs(
    const Eigen::MatrixXd& sq_distances, std::size_t k) {
  const auto rows = static_cast<std::size_t>(sq_distances.rows());
  const auto cols = static_cast<std::size_t>(sq_distances.cols());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  if (rows == 0 || cols == 0) return out;

  // keep_row(r, s): s among the k nearest of r; keep_col likewise.
  std::vector<char> keep_row(rows * cols, 0);
  std::vector<char> keep_col(rows * cols, 0);
  std::vector<std::uint32_t> order;
  const std::size_t kr = std::min(k, cols);
  order.resize(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::iota(order.begin(), order.end(), 0u);
    const auto less = [&](std::uint32_t a, std::uint32_t b) {
      const double da = sq_distances(static_cast<Eigen::Index>(r), a);
      const double db = sq_distances(static_cast<Eigen::Index>(r), b);
      return da < db || (da == db && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kr - 1),
                     order.end(), less);
    for (std::size_t q = 0; q < kr; ++q) keep_row[r * cols + order[q]] = 1;
  }
  const std::size_t kc = std::min(k, rows);
  order.resize(rows);
  for (std::size_t s = 0; s < cols; ++s) {
    std::iota(order.begin(), order.end(), 0u);
    const auto less = [&](std::uint32_t a, std::uint32_t b) {
      const double da = sq_distances(a, static_cast<Eigen::Index>(s));
      const double db = sq_distances(b, static_cast<Eigen::Index>(s));
      return da < db || (da == db && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kc - 1),
                     order.end(), less);
    for (std::size_t q = 0; q < kc; ++q) keep_col[order[q] * cols + s] = 1;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t s = 0; s < cols; ++s) {
      if (keep_row[r * cols + s] && keep_col[r * cols + s]) {
        out.emplace_back(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(s));
      }
    }
  }
  return out;
}

namespace {

struct BlockEntry {
  std::uint32_t r;
  std::uint32_t s;
  double w;
};

// Block between fibres a < b in canonical orientation: rows index fibre a,
// columns fibre b. Both W(a, b) and W(b, a) are read from this one
// computation, which makes the assembled matrix exactly symmetric.
std::vector<BlockEntry> canonical_block(const BundleSampleSet& samples,
                                        std::size_t a, std::size_t b,
                                        const KernelConfig& cfg,
                                        const EdgeTransports* transports) {
  const Vec3 xa = samples.base.col(static_cast<Eigen::Index>(a));
  const Vec3 xb = samples.base.col(static_cast<Eigen::Index>(b));
  const double base_term = (xa - xb).squaredNorm() / cfg.eps;
  std::vector<BlockEntry> out;
  if (cfg.family == KernelFamily::compact_product && base_term >= 1.0) return out;

  const Eigen::MatrixXd& fa = samples.fibres[a];
  const Eigen::MatrixXd& fb = samples.fibres[b];
  Eigen::MatrixXd moved;
  if (samples.mode == SampleMode::exact) {
    moved = geometry::transport_rotation(xa, xb) * fa;
  } else {
    moved = transports->get(a, b) * fa;
  }
  if (moved.rows() != fb.rows()) {
    throw AssemblyError("fibre sample dimensions differ between fibres " +
                        std::to_string(a) + " and " + std::to_string(b));
  }
  Eigen::MatrixXd sq(moved.cols(), fb.cols());
  for (Eigen::Index s = 0; s < fb.cols(); ++s) {
    for (Eigen::Index r = 0; r < moved.cols(); ++r) {
      sq(r, s) = fibre_sq_distance(cfg.fibre_metric, moved.col(r), fb.col(s));
    }
  }
  for (const auto& [r, s] : mutual_knn_pairs(sq, cfg.k_fibre)) {
    const double w = kernel_profile(cfg.family, base_term, sq(r, s) / cfg.delta);
    if (w > 0.0) out.push_back({r, s, w});
  }
  return out;
}

struct VertexRows {
  std::vector<std::int64_t> counts;  // entries per row of the fibre
  std::vector<std::int32_t> cols;
  std::vector<double> values;
};

VertexRows assemble_vertex(const BundleSampleSet& samples, const NeighborGraph& graph,
                           const std::vector<std::size_t>& offsets, std::size_t i,
                           const KernelConfig& cfg, const EdgeTransports* transports) {
  const std::size_t kappa = offsets[i + 1] - offsets[i];
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(kappa);
  for (std::size_t j : graph.adjacency[i]) {
    const bool forward = i < j;
    const auto block = forward ? canonical_block(samples, i, j, cfg, transports)
                               : canonical_block(samples, j, i, cfg, transports);
    for (const auto& e : block) {
      if (forward) {
        rows[e.r].emplace_back(static_cast<std::int32_t>(offsets[j] + e.s), e.w);
      } else {
        rows[e.s].emplace_back(static_cast<std::int32_t>(offsets[j] + e.r), e.w);
      }
    }
  }
  VertexRows out;
  out.counts.resize(kappa);
  for (std::size_t r = 0; r < kappa; ++r) {
    out.counts[r] = static_cast<std::int64_t>(rows[r].size());
    for (const auto& [c, w] : rows[r]) {
      out.cols.push_back(c);
      out.values.push_back(w);
    }
  }
  return out;
}

}  // namespace

BlockSparseMatrix assemble_block_matrix(const BundleSampleSet& samples,
                                        const NeighborGraph& graph,
                                        const KernelConfig& cfg,
                                        const EdgeTransports* transports) {
  cfg.validate();
  if (graph.n != samples.num_fibres()) {
    throw AssemblyError("base graph size differs from the number of fibres");
  }
  if (samples.mode == SampleMode::empirical) {
    if (transports == nullptr) {
      throw AssemblyError("empirical assembly needs estimated transports");
    }
    for (std::size_t i = 0; i < graph.n; ++i) {
      for (std::size_t j : graph.adjacency[i]) {
        if (!transports->contains(i, j)) {
          throw AssemblyError("no estimated transport for base edge (" +
                              std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
  }
  const std::vector<std::size_t> offsets = samples.block_offsets();
  const std::size_t n = offsets.back();

  std::vector<std::int64_t> row_ptr(n + 1, 0);
  std::vector<std::int32_t> cols;
  std::vector<double> values;

  // Vertices are processed in chunks; rows inside a chunk are computed in
  // parallel and appended in vertex order, so the result does not depend on
  // the thread count.
  constexpr std::size_t kChunk = 64;
  std::vector<VertexRows> chunk(kChunk);
  std::exception_ptr failure;
  for (std::size_t start = 0; start < graph.n; start += kChunk) {
    const std::size_t stop = std::min(graph.n, start + kChunk);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t v = static_cast<std::ptrdiff_t>(start);
         v < static_cast<std::ptrdiff_t>(stop); ++v) {
      const auto i = static_cast<std::size_t>(v);
      try {
        chunk[i - start] = assemble_vertex(samples, graph, offsets, i, cfg, transports);
      } catch (...) {
#pragma omp critical(assembly_error)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = start; i < stop; ++i) {
      VertexRows& vr = chunk[i - start];
      for (std::size_t r = 0; r < vr.counts.size(); ++r) {
        row_ptr[offsets[i] + r + 1] = vr.counts[r];
      }
      cols.insert(cols.end(), vr.cols.begin(), vr.cols.end());
      values.insert(values.end(), vr.values.begin(), vr.values.end());
      vr = VertexRows{};
    }
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return BlockSparseMatrix(offsets, std::move(row_ptr), std::move(cols), std::move(values));
}

}  // namespace hypolap::bundle
