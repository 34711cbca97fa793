#pragma once

// Configuration and the file-based stages behind the command-line tool:
// sample -> build -> eig -> embed -> afap -> report.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hypolap/bundle_graph.hpp"
#include "hypolap/embedding.hpp"
#include "hypolap/laplacian.hpp"
#include "hypolap/spectral.hpp"
#include "hypolap/tangent_pca.hpp"

namespace hypolap::pipeline {

struct RunConfig {
  std::size_t n_base = 800;
  std::size_t n_fibre = 32;
  std::size_t k_base = 60;
  std::size_t k_fibre = 16;
  double eps = 0.35;
  double delta = 0.02625;
  double alpha = 1.0;
  double eps_pca = 0.0;  // 0 selects n_base^(-1/2)
  bundle::SampleMode mode = bundle::SampleMode::exact;
  std::size_t m_eigs = 36;
  double t = 1.0;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "run";

  bundle::KernelFamily kernel = bundle::KernelFamily::gaussian_product;
  bundle::FibreMetric fibre_metric = bundle::FibreMetric::chordal;
  geometry::FibreSampling fibre_sampling = geometry::FibreSampling::random;
  LaplacianKind laplacian = LaplacianKind::symmetric;
  EmbeddingConvention convention = EmbeddingConvention::paper_literal;
  double rel_gap = 0.2;
  double solver_tol = 1e-8;
  std::size_t solver_basis = 0;
  std::size_t solver_max_matvecs = 200000;
  std::size_t dense_threshold = 3000;
  std::size_t pca_k_neighbors = 40;
  pca::WeightKernel pca_kernel = pca::WeightKernel::gaussian5;
  std::size_t pca_dim = 2;  // 0 estimates the dimension
  std::size_t pca_min_neighbors = 3;  // 0 disables radius widening at sparse points
  std::size_t anchor_fibre = 0;
  std::size_t anchor_sample = 0;
  double afap_t = 1.0;
  std::string matrix_text = "auto";  // auto | always | never

  void validate() const;
  bundle::KernelConfig kernel_config() const;
  pca::PcaConfig pca_config() const;
  SolverOptions solver_options() const;
  double effective_eps_pca() const;
};

// Names of every configuration key, in documentation order.
const std::vector<std::string>& config_keys();

// Applies `key = value` pairs on top of `base`. Unknown keys and malformed
// values raise InvalidArgument.
RunConfig apply_settings(RunConfig base, const std::map<std::string, std::string>& settings);

// Parses a flat `key = value` file (`#` starts a comment; `key value` also
// accepted).
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Defaults, then the file (if any), then the overrides.
RunConfig load_config(const std::filesystem::path& file,
                      const std::map<std::string, std::string>& overrides);

std::map<std::string, std::string> config_to_settings(const RunConfig& cfg);

void run_sample(const RunConfig& cfg);
void run_build(const RunConfig& cfg);
void run_eig(const RunConfig& cfg);
void run_embed(const RunConfig& cfg);
void run_afap(const RunConfig& cfg);
void run_report(const RunConfig& cfg);

}  // namespace hypolap::pipeline
