#include "hypolap/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "hypolap/afap.hpp"
#include "hypolap/errors.hpp"
#include "hypolap/io.hpp"
#include "hypolap/svg.hpp"

namespace hypolap::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

const EnumName<bundle::SampleMode> kModes[] = {{bundle::SampleMode::exact, "exact"},
                                               {bundle::SampleMode::empirical, "empirical"}};
const EnumName<bundle::KernelFamily> kKernels[] = {
    {bundle::KernelFamily::gaussian_product, "gaussian_product"},
    {bundle::KernelFamily::compact_product, "compact_product"}};
const EnumName<bundle::FibreMetric> kMetrics[] = {{bundle::FibreMetric::chordal, "chordal"},
                                                  {bundle::FibreMetric::geodesic, "geodesic"}};
const EnumName<geometry::FibreSampling> kSamplings[] = {
    {geometry::FibreSampling::random, "random"},
    {geometry::FibreSampling::equispaced, "equispaced"}};
const EnumName<LaplacianKind> kLaplacians[] = {{LaplacianKind::symmetric, "symmetric"},
                                               {LaplacianKind::unnormalized, "unnormalized"},
                                               {LaplacianKind::random_walk, "random_walk"}};
const EnumName<EmbeddingConvention> kConventions[] = {
    {EmbeddingConvention::paper_literal, "paper_literal"},
    {EmbeddingConvention::diffusion, "diffusion"}};
const EnumName<pca::WeightKernel> kPcaKernels[] = {
    {pca::WeightKernel::epanechnikov, "epanechnikov"},
    {pca::WeightKernel::gaussian5, "gaussian5"}};

template <typename E, std::size_t N>
E parse_enum(const EnumName<E> (&table)[N], const std::string& key, const std::string& v) {
  for (const auto& e : table) {
    if (v == e.name) return e.value;
  }
  std::string allowed;
  for (const auto& e : table) allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
  throw_invalid("config key '" + key + "': unknown value '" + v + "' (allowed: " + allowed + ")");
}

template <typename E, std::size_t N>
std::string enum_name(const EnumName<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used == v.size() && v[0] != '-') return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
  }
  throw_invalid("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw_invalid("config key '" + key + "': expected a number, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define COUNT_KEY(field)                                                          \
  KeySpec {                                                                       \
    #field, [](RunConfig& c, const std::string& v) { c.field = parse_count(#field, v); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }               \
  }
#define REAL_KEY(field)                                                            \
  KeySpec {                                                                        \
    #field, [](RunConfig& c, const std::string& v) { c.field = parse_double(#field, v); }, \
        [](const RunConfig& c) { return io::format_real(c.field); }               \
  }
#define ENUM_KEY(field, table)                                                          \
  KeySpec {                                                                             \
    #field, [](RunConfig& c, const std::string& v) { c.field = parse_enum(table, #field, v); }, \
        [](const RunConfig& c) { return enum_name(table, c.field); }                    \
  }

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      COUNT_KEY(n_base),
      COUNT_KEY(n_fibre),
      COUNT_KEY(k_base),
      COUNT_KEY(k_fibre),
      REAL_KEY(eps),
      REAL_KEY(delta),
      REAL_KEY(alpha),
      REAL_KEY(eps_pca),
      ENUM_KEY(mode, kModes),
      COUNT_KEY(m_eigs),
      REAL_KEY(t),
      KeySpec{"seed",
              [](RunConfig& c, const std::string& v) { c.seed = parse_count("seed", v); },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
      KeySpec{"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
              [](const RunConfig& c) { return c.out_dir.string(); }},
      ENUM_KEY(kernel, kKernels),
      ENUM_KEY(fibre_metric, kMetrics),
      ENUM_KEY(fibre_sampling, kSamplings),
      ENUM_KEY(laplacian, kLaplacians),
      ENUM_KEY(convention, kConventions),
      REAL_KEY(rel_gap),
      REAL_KEY(solver_tol),
      COUNT_KEY(solver_basis),
      COUNT_KEY(solver_max_matvecs),
      COUNT_KEY(dense_threshold),
      COUNT_KEY(pca_k_neighbors),
      ENUM_KEY(pca_kernel, kPcaKernels),
      COUNT_KEY(pca_dim),
      COUNT_KEY(pca_min_neighbors),
      COUNT_KEY(anchor_fibre),
      COUNT_KEY(anchor_sample),
      REAL_KEY(afap_t),
      KeySpec{"matrix_text",
              [](RunConfig& c, const std::string& v) {
                if (v != "auto" && v != "always" && v != "never") {
                  throw_invalid("config key 'matrix_text': expected auto, always or never");
                }
                c.matrix_text = v;
              },
              [](const RunConfig& c) { return c.matrix_text; }},
  };
  return specs;
}

#undef COUNT_KEY
#undef REAL_KEY
#undef ENUM_KEY

// Text matrices above this many entries are skipped when matrix_text = auto.
constexpr std::size_t kAutoTextLimit = 5'000'000;

class StageTimer {
 public:
  explicit StageTimer(std::string stage) : stage_(std::move(stage)) {}
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    laps_[name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  void write(const fs::path& dir) const {
    json j;
    j["stage"] = stage_;
    j["seconds"] = laps_;
    io::write_file(dir / ("timing_" + stage_ + ".json"), j.dump(2) + "\n");
  }

 private:
  std::string stage_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  std::map<std::string, double> laps_;
};

void require(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing artifact: " + path.string());
}

bundle::BundleSampleSet load_samples(const RunConfig& cfg) {
  if (cfg.mode == bundle::SampleMode::exact) {
    require(cfg.out_dir / "bundle.txt");
    return io::read_bundle(cfg.out_dir / "bundle.txt");
  }
  require(cfg.out_dir / "base.txt");
  require(cfg.out_dir / "coefficients.txt");
  return io::read_coefficients(cfg.out_dir / "coefficients.txt",
                               io::read_points(cfg.out_dir / "base.txt"));
}

json load_json(const fs::path& path) {
  require(path);
  try {
    return json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (n_base < 1 || n_fibre < 1 || k_base < 1 || k_fibre < 1 || m_eigs < 1) {
    throw_invalid("counts must be >= 1");
  }
  if (!(eps > 0.0) || !(delta > 0.0)) throw_invalid("bandwidths must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw_invalid("alpha must lie in [0, 1]");
  if (!(eps_pca >= 0.0)) throw_invalid("eps_pca must be positive (or 0 for the default)");
  if (!(t >= 0.0) || !(afap_t >= 0.0)) throw_invalid("diffusion times must be >= 0");
  if (!(rel_gap > 0.0)) throw_invalid("rel_gap must be positive");
  if (!(solver_tol > 0.0)) throw_invalid("solver_tol must be positive");
}

bundle::KernelConfig RunConfig::kernel_config() const {
  bundle::KernelConfig k;
  k.eps = eps;
  k.delta = delta;
  k.k_base = k_base;
  k.k_fibre = k_fibre;
  k.family = kernel;
  k.alpha = alpha;
  k.fibre_metric = fibre_metric;
  return k;
}

double RunConfig::effective_eps_pca() const {
  return eps_pca > 0.0 ? eps_pca : 1.0 / std::sqrt(static_cast<double>(n_base));
}

pca::PcaConfig RunConfig::pca_config() const {
  pca::PcaConfig p;
  p.eps_pca = effective_eps_pca();
  p.k_neighbors = pca_k_neighbors;
  p.weight_kernel = pca_kernel;
  if (pca_dim > 0) p.target_dim = pca_dim;
  p.min_neighbors = pca_min_neighbors;
  return p;
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions s;
  s.tol = solver_tol;
  s.basis_size = solver_basis;
  s.max_matvecs = solver_max_matvecs;
  s.dense_threshold = dense_threshold;
  s.seed = derive_seed(RngSeed{seed}, Stream::solver_start);
  return s;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : key_specs()) k.push_back(s.name);
    return k;
  }();
  return keys;
}

RunConfig apply_settings(RunConfig base, const std::map<std::string, std::string>& settings) {
  for (const auto& [key, value] : settings) {
    const auto& specs = key_specs();
    const auto it = std::find_if(specs.begin(), specs.end(),
                                 [&](const KeySpec& s) { return s.name == key; });
    if (it == specs.end()) throw_invalid("unknown config key '" + key + "'");
    it->set(base, value);
  }
  return base;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string key, value;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = trim(line.substr(0, eq));
      value = trim(line.substr(eq + 1));
    } else {
      const auto sp = line.find_first_of(" \t");
      if (sp == std::string::npos) {
        throw_invalid("config line " + std::to_string(number) + ": missing value");
      }
      key = trim(line.substr(0, sp));
      value = trim(line.substr(sp + 1));
    }
    if (key.empty() || value.empty()) {
      throw_invalid("config line " + std::to_string(number) + ": expected `key = value`");
    }
    out[key] = value;
  }
  return out;
}

RunConfig load_config(const fs::path& file,
                      const std::map<std::string, std::string>& overrides) {
  RunConfig cfg;
  if (!file.empty()) cfg = apply_settings(cfg, parse_config_text(io::read_file(file)));
  cfg = apply_settings(cfg, overrides);
  cfg.validate();
  return cfg;
}

std::map<std::string, std::string> config_to_settings(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& s : key_specs()) out[s.name] = s.get(cfg);
  return out;
}

void run_sample(const RunConfig& cfg) {
  StageTimer timer("sample");
  const RngSeed seed{cfg.seed};
  fs::create_directories(cfg.out_dir);
  if (cfg.mode == bundle::SampleMode::exact) {
    const auto samples =
        bundle::sample_exact_bundle(cfg.n_base, cfg.n_fibre, cfg.fibre_sampling, seed);
    io::write_points(cfg.out_dir / "base.txt", samples.base);
    io::write_bundle(cfg.out_dir / "bundle.txt", samples);
  } else {
    const auto samples = bundle::sample_empirical_bundle(cfg.n_base, cfg.n_fibre, seed);
    io::write_points(cfg.out_dir / "base.txt", samples.base);
    io::write_coefficients(cfg.out_dir / "coefficients.txt", samples);
  }
  timer.lap("sample");
  timer.write(cfg.out_dir);
}

void run_build(const RunConfig& cfg) {
  StageTimer timer("build");
  const auto samples = load_samples(cfg);
  samples.validate();
  timer.lap("load");

  const auto graph = bundle::build_base_knn(samples.base, cfg.k_base);
  if (!graph.connected()) {
    throw ConnectivityError("base affinity graph has " +
                                std::to_string(graph.num_components()) +
                                " components; increase k_base",
                            0);
  }
  timer.lap("graph");

  bundle::EdgeTransports transports;
  if (cfg.mode == bundle::SampleMode::empirical) {
    const auto frames = pca::estimate_frames(samples.base, cfg.pca_config());
    io::write_frames(cfg.out_dir / "frames.txt", frames);
    transports = bundle::estimate_edge_transports(frames, graph);
    io::write_transports(cfg.out_dir / "transports.txt", transports);
    timer.lap("frames");
  }

  BlockSparseMatrix w = bundle::assemble_block_matrix(
      samples, graph, cfg.kernel_config(),
      cfg.mode == bundle::SampleMode::empirical ? &transports : nullptr);
  timer.lap("assembly");
  const Eigen::VectorXd raw_degrees = degree_vector(w);
  io::write_vector(cfg.out_dir / "raw_degrees.txt", raw_degrees);
  w = alpha_normalize(std::move(w), cfg.alpha);
  const Eigen::VectorXd degrees = degree_vector(w);
  io::write_vector(cfg.out_dir / "degrees.txt", degrees);
  timer.lap("normalize");

  const bool text = cfg.matrix_text == "always" ||
                    (cfg.matrix_text == "auto" && w.nnz() <= kAutoTextLimit);
  if (text) io::write_matrix_text(cfg.out_dir / "weights.txt", w);
  io::write_matrix_binary(cfg.out_dir / "weights.bin", w);

  json meta;
  meta["kappa"] = w.size();
  meta["nnz"] = w.nnz();
  meta["n_base"] = samples.num_fibres();
  meta["base_edges"] = graph.num_edges();
  meta["alpha"] = cfg.alpha;
  meta["laplacian"] = enum_name(kLaplacians, cfg.laplacian);
  meta["mode"] = enum_name(kModes, cfg.mode);
  meta["eps"] = cfg.eps;
  meta["delta"] = cfg.delta;
  meta["block_offsets"] = w.block_offsets();
  meta["text_matrix"] = text;
  io::write_file(cfg.out_dir / "metadata.json", meta.dump(2) + "\n");
  timer.lap("write");
  timer.write(cfg.out_dir);
}

void run_eig(const RunConfig& cfg) {
  StageTimer timer("eig");
  require(cfg.out_dir / "weights.bin");
  auto w = io::read_matrix_binary(cfg.out_dir / "weights.bin");
  const LaplacianOperator lap = build_laplacian(std::move(w), cfg.laplacian);
  timer.lap("load");
  const SpectralResult spec = smallest_eigenpairs(lap, cfg.m_eigs, cfg.solver_options());
  timer.lap("solve");

  io::write_eigenvalues_csv(cfg.out_dir / "eigenvalues.csv", spec);
  io::write_spectrum_binary(cfg.out_dir / "eigenvectors.bin", spec);
  std::vector<double> values(spec.eigenvalues.data(),
                             spec.eigenvalues.data() + spec.eigenvalues.size());
  const ClusterReport report = cluster_eigenvalues(values, cfg.rel_gap);
  io::write_file(cfg.out_dir / "clusters.json", io::cluster_report_json(report, cfg.rel_gap));
  std::ostringstream plot;
  plot << "index,eigenvalue\n";
  for (std::size_t l = 0; l < values.size(); ++l) {
    plot << l << ',' << io::format_real(values[l]) << '\n';
  }
  io::write_file(cfg.out_dir / "spectrum_plot.csv", plot.str());
  std::string title = "smallest " + std::to_string(values.size()) + " eigenvalues, multiplicities";
  for (std::size_t m : report.multiplicities) title += " " + std::to_string(m);
  io::write_file(cfg.out_dir / "spectrum.svg", svg::spectrum_bars(values, title));
  timer.lap("write");
  timer.write(cfg.out_dir);
}

void run_embed(const RunConfig& cfg) {
  StageTimer timer("embed");
  require(cfg.out_dir / "eigenvectors.bin");
  const SpectralResult spec = io::read_spectrum_binary(cfg.out_dir / "eigenvectors.bin");
  const EmbeddingCoordinates h = hdm_embed(spec, cfg.t, cfg.convention);
  io::write_hdm_csv(cfg.out_dir / "hdm.csv", h, spec.block_offsets);
  io::write_hdm_csv(cfg.out_dir / "hdm_normalized.csv", hdm_normalize(h), spec.block_offsets);
  io::write_hbdm_csv(cfg.out_dir / "hbdm.csv", hbdm_embed(spec, cfg.t));
  timer.lap("embed");
  timer.write(cfg.out_dir);
}

void run_afap(const RunConfig& cfg) {
  StageTimer timer("afap");
  require(cfg.out_dir / "eigenvectors.bin");
  const SpectralResult spec = io::read_spectrum_binary(cfg.out_dir / "eigenvectors.bin");
  const auto samples = load_samples(cfg);
  if (cfg.anchor_fibre >= samples.num_fibres()) throw_invalid("anchor_fibre out of range");
  const EmbeddingCoordinates coords = hdm_normalize(
      hdm_embed(spec, cfg.afap_t, EmbeddingConvention::paper_literal));
  const SampleIndex anchor{cfg.anchor_fibre, cfg.anchor_sample};
  const DiscreteSection section = extract_section(coords, samples, anchor);

  // Ambient vectors and angle errors: empirical samples are lifted with the
  // frames estimated during the build stage.
  bundle::BundleSampleSet tangents;
  DiscreteSection ambient = section;
  if (samples.mode == bundle::SampleMode::exact) {
    tangents = samples;
  } else {
    require(cfg.out_dir / "frames.txt");
    tangents = bundle::lift_to_tangents(samples, io::read_frames(cfg.out_dir / "frames.txt"));
    for (std::size_t k = 0; k < samples.num_fibres(); ++k) {
      if (k == 0) ambient.vectors.resize(3, static_cast<Eigen::Index>(samples.num_fibres()));
      ambient.vectors.col(static_cast<Eigen::Index>(k)) =
          tangents.fibres[k].col(static_cast<Eigen::Index>(section.choices[k]));
    }
  }
  const SectionAngleReport report = section_angle_report(ambient, tangents);
  std::vector<double> errors(samples.num_fibres(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : report.entries) errors[e.fibre] = e.angle_error;
  io::write_section(cfg.out_dir / "section.txt", samples.base, ambient.vectors, errors);
  const Vec3 view = samples.base.col(static_cast<Eigen::Index>(cfg.anchor_fibre));
  io::write_file(cfg.out_dir / "section.svg",
                 svg::sphere_quiver(samples.base, ambient.vectors, view,
                                    "section from fibre " + std::to_string(cfg.anchor_fibre) +
                                        ", sample " + std::to_string(cfg.anchor_sample)));
  timer.lap("afap");
  timer.write(cfg.out_dir);
}

void run_report(const RunConfig& cfg) {
  const json meta = load_json(cfg.out_dir / "metadata.json");
  const json clusters = load_json(cfg.out_dir / "clusters.json");
  require(cfg.out_dir / "eigenvalues.csv");
  const std::vector<double> values = io::read_eigenvalues_csv(cfg.out_dir / "eigenvalues.csv");

  json report;
  report["config"] = config_to_settings(cfg);
  report["matrix"] = {{"kappa", meta.at("kappa")},
                      {"nnz", meta.at("nnz")},
                      {"n_base", meta.at("n_base")},
                      {"base_edges", meta.at("base_edges")},
                      {"alpha", meta.at("alpha")},
                      {"laplacian", meta.at("laplacian")}};
  report["eigenvalues"] = values;
  report["clusters"] = clusters;
  json timing = json::object();
  for (const char* stage : {"sample", "build", "eig", "embed", "afap"}) {
    const fs::path p = cfg.out_dir / (std::string("timing_") + stage + ".json");
    if (fs::exists(p)) timing[stage] = load_json(p).at("seconds");
  }
  report["timing"] = timing;
  io::write_file(cfg.out_dir / "report.json", report.dump(2) + "\n");
}

}  // namespace hypolap::pipeline
