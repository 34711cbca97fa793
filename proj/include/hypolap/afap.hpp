#pragma once

// Section extraction by nearest-neighbor matching in the normalized
// hypoelliptic diffusion embedding: one sample per fibre is chosen to follow
// an anchor sample as flatly as possible.

#include <cstddef>
#include <utility>
#include <vector>

#include "hypolap/bundle_graph.hpp"
#include "hypolap/embedding.hpp"

namespace hypolap {

struct SampleIndex {
  std::size_t fibre = 0;
  std::size_t sample = 0;
};

struct DiscreteSection {
  SampleIndex anchor;
  std::vector<std::size_t> choices;  // chosen sample per fibre
  Eigen::MatrixXd vectors;           // chosen fibre sample per fibre, as columns
};

// Sample r of fibre k whose embedded row is closest to the anchor row; ties go
// to the smaller index. `coords` must be row-normalized.
std::size_t transport_via_embedding(const EmbeddingCoordinates& coords,
                                    const std::vector<std::size_t>& block_offsets,
                                    SampleIndex anchor, std::size_t k);

DiscreteSection extract_section(const EmbeddingCoordinates& coords,
                                const bundle::BundleSampleSet& samples,
                                SampleIndex anchor);

struct SectionAngle {
  std::size_t fibre = 0;
  double base_distance = 0.0;  // geodesic distance from the anchor base point
  double angle_error = 0.0;    // radians, against exact transport of the anchor vector
};

struct SectionAngleReport {
  std::vector<SectionAngle> entries;
  std::vector<std::size_t> skipped;  // fibres antipodal to the anchor
};

// Exact-mode samples only.
SectionAngleReport section_angle_report(const DiscreteSection& section,
                                        const bundle::BundleSampleSet& samples);

}  // namespace hypolap
