#include "hypolap/afap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hypolap/errors.hpp"
#include "hypolap/geometry.hpp"

namespace hypolap {

namespace {

void check_normalized(const EmbeddingCoordinates& coords) {
  for (Eigen::Index r = 0; r < coords.per_point.rows(); ++r) {
    if (std::abs(coords.per_point.row(r).norm() - 1.0) > 1e-10) {
      throw_invalid("section extraction needs row-normalized embedding coordinates "
                    "(row " + std::to_string(r) + ")");
    }
  }
}

std::size_t nearest_in_fibre(const EmbeddingCoordinates& coords,
                             const std::vector<std::size_t>& offsets,
                             const Eigen::RowVectorXd& target, std::size_t k) {
  if (k + 1 >= offsets.size()) throw_invalid("fibre index out of range");
  const std::size_t begin = offsets[k];
  const std::size_t end = offsets[k + 1];
  if (begin == end) throw_invalid("fibre " + std::to_string(k) + " is empty");
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t r = begin; r < end; ++r) {
    const double d = (coords.per_point.row(static_cast<Eigen::Index>(r)) - target)
                         .squaredNorm();
    if (d < best_sq) {
      best_sq = d;
      best = r - begin;
    }
  }
  return best;
}

Eigen::RowVectorXd anchor_row(const EmbeddingCoordinates& coords,
                              const std::vector<std::size_t>& offsets,
                              SampleIndex anchor) {
  if (anchor.fibre + 1 >= offsets.size() ||
      anchor.sample >= offsets[anchor.fibre + 1] - offsets[anchor.fibre]) {
    throw_invalid("anchor sample out of range");
  }
  if (offsets.back() != static_cast<std::size_t>(coords.per_point.rows())) {
    throw_invalid("embedding rows do not match the fibre layout");
  }
  return coords.per_point.row(
      static_cast<Eigen::Index>(offsets[anchor.fibre] + anchor.sample));
}

}  // namespace

std::size_t transport_via_embedding(const EmbeddingCoordinates& coords,
                                    const std::vector<std::size_t>& block_offsets,
                                    SampleIndex anchor, std::size_t k) {
  check_normalized(coords);
  return nearest_in_fibre(coords, block_offsets,
                          anchor_row(coords, block_offsets, anchor), k);
}

DiscreteSection extract_section(const EmbeddingCoordinates& coords,
                                const bundle::BundleSampleSet& samples,
                                SampleIndex anchor) {
  check_normalized(coords);
  const std::vector<std::size_t> offsets = samples.block_offsets();
  const Eigen::RowVectorXd target = anchor_row(coords, offsets, anchor);
  const std::size_t nb = samples.num_fibres();
  DiscreteSection section;
  section.anchor = anchor;
  section.choices.resize(nb);
  section.vectors.resize(samples.fibres[anchor.fibre].rows(),
                         static_cast<Eigen::Index>(nb));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(nb); ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    section.choices[k] =
        k == anchor.fibre ? anchor.sample : nearest_in_fibre(coords, offsets, target, k);
  }
  for (std::size_t k = 0; k < nb; ++k) {
    section.vectors.col(static_cast<Eigen::Index>(k)) =
        samples.fibres[k].col(static_cast<Eigen::Index>(section.choices[k]));
  }
  return section;
}

SectionAngleReport section_angle_report(const DiscreteSection& section,
                                        const bundle::BundleSampleSet& samples) {
  if (samples.mode != bundle::SampleMode::exact) {
    throw_invalid("section_angle_report needs exact tangent samples");
  }
  const std::size_t j = section.anchor.fibre;
  const Vec3 xi_j = samples.base.col(static_cast<Eigen::Index>(j));
  const Vec3 x_js = samples.fibres[j].col(static_cast<Eigen::Index>(section.anchor.sample));
  SectionAngleReport report;
  for (std::size_t k = 0; k < samples.num_fibres(); ++k) {
    const Vec3 xi_k = samples.base.col(static_cast<Eigen::Index>(k));
    const Vec3 chosen = section.vectors.col(static_cast<Eigen::Index>(k));
    if (k == j) {
      report.entries.push_back({k, 0.0, 0.0});
      continue;
    }
    Vec3 exact = x_js;
    if (xi_j.cross(xi_k).norm() >= 1e-12) {
      exact = geometry::parallel_transport(xi_j, xi_k, x_js);
    } else if (xi_j.dot(xi_k) < 0.0) {
      report.skipped.push_back(k);
      continue;
    }
    const double angle = std::atan2(exact.cross(chosen).norm(), exact.dot(chosen));
    report.entries.push_back({k, geometry::geodesic_distance(xi_j, xi_k), angle});
  }
  return report;
}

}  // namespace hypolap
