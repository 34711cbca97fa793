#include "hypolap/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

#include "hypolap/errors.hpp"

namespace hypolap::io {

namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  throw IoError(path.string() + ": " + what);
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) io_fail(path, "cannot open for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) io_fail(path, "cannot open for reading");
  return in;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) io_fail(path, "write failed");
}

// Non-empty, non-comment lines split into whitespace-separated tokens.
std::vector<std::vector<std::string>> read_rows(const fs::path& path, char sep = ' ') {
  std::ifstream in = open_in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (sep != ' ') {
      for (char& c : line) {
        if (c == sep) c = ' ';
      }
    }
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    if (!tokens.empty()) rows.push_back(std::move(tokens));
  }
  return rows;
}

double parse_real(const fs::path& path, const std::string& tok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) io_fail(path, "malformed number '" + tok + "'");
    return v;
  } catch (const std::invalid_argument&) {
    io_fail(path, "malformed number '" + tok + "'");
  } catch (const std::out_of_range&) {
    // Subnormal values are reported out of range by stod; parse them anyway.
    return std::strtod(tok.c_str(), nullptr);
  }
}

std::size_t parse_index(const fs::path& path, const std::string& tok) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size() || tok[0] == '-') io_fail(path, "malformed index '" + tok + "'");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    io_fail(path, "malformed index '" + tok + "'");
  }
}

void expect_columns(const fs::path& path, const std::vector<std::string>& row,
                    std::size_t n, std::size_t line) {
  if (row.size() != n) {
    io_fail(path, "row " + std::to_string(line) + " has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(n));
  }
}

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_array(std::ostream& out, const T* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
T get(std::istream& in, const fs::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) io_fail(path, "truncated binary file");
  return v;
}

template <typename T>
void get_array(std::istream& in, const fs::path& path, T* data, std::size_t n) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) io_fail(path, "truncated binary file");
}

constexpr char kMatrixMagic[8] = {'H', 'Y', 'P', 'W', 'M', 'A', 'T', '1'};
constexpr char kSpectrumMagic[8] = {'H', 'Y', 'P', 'S', 'P', 'E', 'C', '1'};

void check_magic(std::istream& in, const fs::path& path, const char (&magic)[8]) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0) io_fail(path, "unrecognized binary header");
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out = open_out(path, true);
  out << contents;
  finish(out, path);
}

void write_points(const fs::path& path, const PointCloud& points) {
  std::ofstream out = open_out(path);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (Eigen::Index d = 0; d < points.rows(); ++d) {
      out << (d ? " " : "") << format_real(points(d, j));
    }
    out << '\n';
  }
  finish(out, path);
}

PointCloud read_points(const fs::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) return PointCloud(3, 0);
  const std::size_t dim = rows[0].size();
  PointCloud points(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    expect_columns(path, rows[j], dim, j);
    for (std::size_t d = 0; d < dim; ++d) {
      points(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)) =
          parse_real(path, rows[j][d]);
    }
  }
  return points;
}

void write_bundle(const fs::path& path, const bundle::BundleSampleSet& samples) {
  if (samples.mode != bundle::SampleMode::exact) {
    throw_invalid("write_bundle expects exact tangent samples");
  }
  std::ofstream out = open_out(path);
  for (std::size_t j = 0; j < samples.num_fibres(); ++j) {
    const auto xi = samples.base.col(static_cast<Eigen::Index>(j));
    const Eigen::MatrixXd& f = samples.fibres[j];
    for (Eigen::Index s = 0; s < f.cols(); ++s) {
      out << j << ' ' << format_real(xi(0)) << ' ' << format_real(xi(1)) << ' '
          << format_real(xi(2)) << ' ' << format_real(f(0, s)) << ' '
          << format_real(f(1, s)) << ' ' << format_real(f(2, s)) << '\n';
    }
  }
  finish(out, path);
}

bundle::BundleSampleSet read_bundle(const fs::path& path) {
  const auto rows = read_rows(path);
  std::map<std::size_t, std::pair<Vec3, std::vector<Vec3>>> fibres;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    expect_columns(path, rows[k], 7, k);
    const std::size_t j = parse_index(path, rows[k][0]);
    Vec3 xi, v;
    for (int d = 0; d < 3; ++d) {
      xi(d) = parse_real(path, rows[k][1 + static_cast<std::size_t>(d)]);
      v(d) = parse_real(path, rows[k][4 + static_cast<std::size_t>(d)]);
    }
    auto& entry = fibres[j];
    if (entry.second.empty()) entry.first = xi;
    entry.second.push_back(v);
  }
  bundle::BundleSampleSet samples;
  samples.mode = bundle::SampleMode::exact;
  samples.base.resize(3, static_cast<Eigen::Index>(fibres.size()));
  std::size_t expect = 0;
  for (auto& [j, entry] : fibres) {
    if (j != expect) io_fail(path, "fibre indices must be 0..N_B-1 without gaps");
    samples.base.col(static_cast<Eigen::Index>(j)) = entry.first;
    Eigen::MatrixXd f(3, static_cast<Eigen::Index>(entry.second.size()));
    for (std::size_t s = 0; s < entry.second.size(); ++s) {
      f.col(static_cast<Eigen::Index>(s)) = entry.second[s];
    }
    samples.fibres.push_back(std::move(f));
    ++expect;
  }
  return samples;
}

void write_coefficients(const fs::path& path, const bundle::BundleSampleSet& samples) {
  std::ofstream out = open_out(path);
  for (std::size_t j = 0; j < samples.num_fibres(); ++j) {
    const Eigen::MatrixXd& f = samples.fibres[j];
    for (Eigen::Index s = 0; s < f.cols(); ++s) {
      out << j;
      for (Eigen::Index d = 0; d < f.rows(); ++d) out << ' ' << format_real(f(d, s));
      out << '\n';
    }
  }
  finish(out, path);
}

bundle::BundleSampleSet read_coefficients(const fs::path& path, const PointCloud& base) {
  const auto rows = read_rows(path);
  bundle::BundleSampleSet samples;
  samples.mode = bundle::SampleMode::empirical;
  samples.base = base;
  std::vector<std::vector<Eigen::VectorXd>> fibres(static_cast<std::size_t>(base.cols()));
  std::size_t dim = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k == 0) dim = rows[0].size() - 1;
    expect_columns(path, rows[k], dim + 1, k);
    const std::size_t j = parse_index(path, rows[k][0]);
    if (j >= fibres.size()) io_fail(path, "fibre index beyond the base point count");
    Eigen::VectorXd c(static_cast<Eigen::Index>(dim));
    for (std::size_t d = 0; d < dim; ++d) {
      c(static_cast<Eigen::Index>(d)) = parse_real(path, rows[k][d + 1]);
    }
    fibres[j].push_back(std::move(c));
  }
  for (const auto& list : fibres) {
    Eigen::MatrixXd f(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(list.size()));
    for (std::size_t s = 0; s < list.size(); ++s) f.col(static_cast<Eigen::Index>(s)) = list[s];
    samples.fibres.push_back(std::move(f));
  }
  return samples;
}

void write_frames(const fs::path& path, const std::vector<pca::TangentFrame>& frames) {
  std::ofstream out = open_out(path);
  for (const auto& f : frames) {
    out << f.base_index;
    for (Eigen::Index c = 0; c < f.basis.cols(); ++c) {
      for (Eigen::Index r = 0; r < f.basis.rows(); ++r) {
        out << ' ' << format_real(f.basis(r, c));
      }
    }
    out << '\n';
  }
  finish(out, path);
}

std::vector<pca::TangentFrame> read_frames(const fs::path& path) {
  const auto rows = read_rows(path);
  std::vector<pca::TangentFrame> frames;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    expect_columns(path, rows[k], 7, k);
    pca::TangentFrame f;
    f.base_index = parse_index(path, rows[k][0]);
    f.basis.resize(3, 2);
    for (std::size_t q = 0; q < 6; ++q) {
      f.basis(static_cast<Eigen::Index>(q % 3), static_cast<Eigen::Index>(q / 3)) =
          parse_real(path, rows[k][q + 1]);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_transports(const fs::path& path, const bundle::EdgeTransports& transports) {
  std::ofstream out = open_out(path);
  for (const auto& e : transports.entries()) {
    // The stored matrix maps `from` (smaller) to `to`: row `to from`.
    out << e.to << ' ' << e.from;
    for (Eigen::Index r = 0; r < e.matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.matrix.cols(); ++c) {
        out << ' ' << format_real(e.matrix(r, c));
      }
    }
    out << '\n';
  }
  finish(out, path);
}

bundle::EdgeTransports read_transports(const fs::path& path) {
  const auto rows = read_rows(path);
  bundle::EdgeTransports transports;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    expect_columns(path, rows[k], 6, k);
    const std::size_t i = parse_index(path, rows[k][0]);
    const std::size_t j = parse_index(path, rows[k][1]);
    Eigen::MatrixXd o(2, 2);
    o << parse_real(path, rows[k][2]), parse_real(path, rows[k][3]),
        parse_real(path, rows[k][4]), parse_real(path, rows[k][5]);
    transports.insert(j, i, std::move(o));
  }
  return transports;
}

void write_matrix_text(const fs::path& path, const BlockSparseMatrix& w) {
  std::ofstream out = open_out(path);
  out << w.size() << ' ' << w.nnz() << '\n';
  const auto ptr = w.row_ptr();
  const auto cols = w.col_index();
  const auto vals = w.values();
  std::string line;
  for (std::size_t r = 0; r < w.size(); ++r) {
    for (auto k = ptr[r]; k < ptr[r + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      line = std::to_string(r);
      line += ' ';
      line += std::to_string(cols[kk]);
      line += ' ';
      line += format_real(vals[kk]);
      line += '\n';
      out << line;
    }
  }
  finish(out, path);
}

BlockSparseMatrix read_matrix_text(const fs::path& path,
                                   std::vector<std::size_t> block_offsets) {
  std::ifstream in = open_in(path);
  std::size_t n = 0, nnz = 0;
  if (!(in >> n >> nnz)) io_fail(path, "missing `n nnz` header");
  if (block_offsets.empty() || block_offsets.back() != n) {
    io_fail(path, "block offsets do not match the matrix size");
  }
  std::vector<MatrixEntry> entries;
  entries.reserve(nnz);
  std::string rs, cs, vs;
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!(in >> rs >> cs >> vs)) io_fail(path, "fewer entries than announced");
    entries.push_back({parse_index(path, rs), parse_index(path, cs), parse_real(path, vs)});
  }
  if (in >> rs) io_fail(path, "more entries than announced");
  try {
    return BlockSparseMatrix::from_entries(std::move(block_offsets), std::move(entries));
  } catch (const InvalidArgument& e) {
    io_fail(path, e.what());
  }
}

void write_matrix_binary(const fs::path& path, const BlockSparseMatrix& w) {
  std::ofstream out = open_out(path, true);
  out.write(kMatrixMagic, 8);
  const auto& offsets = w.block_offsets();
  put<std::uint64_t>(out, w.size());
  put<std::uint64_t>(out, w.nnz());
  put<std::uint64_t>(out, offsets.size());
  for (std::size_t o : offsets) put<std::uint64_t>(out, o);
  put_array(out, w.row_ptr().data(), w.row_ptr().size());
  put_array(out, w.col_index().data(), w.col_index().size());
  put_array(out, w.values().data(), w.values().size());
  finish(out, path);
}

BlockSparseMatrix read_matrix_binary(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  check_magic(in, path, kMatrixMagic);
  const auto n = get<std::uint64_t>(in, path);
  const auto nnz = get<std::uint64_t>(in, path);
  const auto noff = get<std::uint64_t>(in, path);
  std::vector<std::size_t> offsets(noff);
  for (auto& o : offsets) o = get<std::uint64_t>(in, path);
  std::vector<std::int64_t> row_ptr(n + 1);
  std::vector<std::int32_t> cols(nnz);
  std::vector<double> values(nnz);
  get_array(in, path, row_ptr.data(), row_ptr.size());
  get_array(in, path, cols.data(), cols.size());
  get_array(in, path, values.data(), values.size());
  try {
    return BlockSparseMatrix(std::move(offsets), std::move(row_ptr), std::move(cols),
                             std::move(values));
  } catch (const InvalidArgument& e) {
    io_fail(path, e.what());
  }
}

void write_vector(const fs::path& path, const Eigen::VectorXd& v) {
  std::ofstream out = open_out(path);
  for (Eigen::Index k = 0; k < v.size(); ++k) out << format_real(v(k)) << '\n';
  finish(out, path);
}

Eigen::VectorXd read_vector(const fs::path& path) {
  const auto rows = read_rows(path);
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    expect_columns(path, rows[k], 1, k);
    v(static_cast<Eigen::Index>(k)) = parse_real(path, rows[k][0]);
  }
  return v;
}

void write_eigenvalues_csv(const fs::path& path, const SpectralResult& spec) {
  std::ofstream out = open_out(path);
  out << "index,eigenvalue,residual\n";
  for (Eigen::Index l = 0; l < spec.eigenvalues.size(); ++l) {
    out << l << ',' << format_real(spec.eigenvalues(l)) << ','
        << format_real(spec.residuals.size() > l ? spec.residuals(l) : 0.0) << '\n';
  }
  finish(out, path);
}

std::vector<double> read_eigenvalues_csv(const fs::path& path) {
  auto rows = read_rows(path, ',');
  if (rows.empty() || rows[0][0] != "index") io_fail(path, "missing CSV header");
  std::vector<double> values;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    expect_columns(path, rows[k], 3, k);
    if (parse_index(path, rows[k][0]) != k - 1) io_fail(path, "eigenvalue indices out of order");
    values.push_back(parse_real(path, rows[k][1]));
  }
  return values;
}

void write_spectrum_binary(const fs::path& path, const SpectralResult& spec) {
  std::ofstream out = open_out(path, true);
  out.write(kSpectrumMagic, 8);
  const auto n = static_cast<std::uint64_t>(spec.eigenvectors.rows());
  const auto m = static_cast<std::uint64_t>(spec.eigenvalues.size());
  put<std::uint64_t>(out, n);
  put<std::uint64_t>(out, m);
  put<std::uint64_t>(out, spec.block_offsets.size());
  for (std::size_t o : spec.block_offsets) put<std::uint64_t>(out, o);
  put_array(out, spec.eigenvalues.data(), m);
  Eigen::VectorXd res = spec.residuals;
  if (static_cast<std::uint64_t>(res.size()) != m) res = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  put_array(out, res.data(), m);
  put_array(out, spec.eigenvectors.data(), n * m);
  finish(out, path);
}

SpectralResult read_spectrum_binary(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  check_magic(in, path, kSpectrumMagic);
  const auto n = get<std::uint64_t>(in, path);
  const auto m = get<std::uint64_t>(in, path);
  const auto noff = get<std::uint64_t>(in, path);
  SpectralResult spec;
  spec.block_offsets.resize(noff);
  for (auto& o : spec.block_offsets) o = get<std::uint64_t>(in, path);
  spec.eigenvalues.resize(static_cast<Eigen::Index>(m));
  spec.residuals.resize(static_cast<Eigen::Index>(m));
  spec.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  get_array(in, path, spec.eigenvalues.data(), m);
  get_array(in, path, spec.residuals.data(), m);
  get_array(in, path, spec.eigenvectors.data(), n * m);
  spec.method = "file";
  return spec;
}

std::string cluster_report_json(const ClusterReport& report, double rel_gap) {
  nlohmann::json j;
  j["rel_gap"] = rel_gap;
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& [b, e] : report.bounds) bounds.push_back({b, e});
  j["bounds"] = bounds;
  j["multiplicities"] = report.multiplicities;
  j["means"] = report.means;
  j["ratios"] = report.ratios;
  return j.dump(2) + "\n";
}

void write_hdm_csv(const fs::path& path, const EmbeddingCoordinates& coords,
                   const std::vector<std::size_t>& block_offsets) {
  if (block_offsets.empty() ||
      block_offsets.back() != static_cast<std::size_t>(coords.per_point.rows())) {
    throw_invalid("write_hdm_csv: block offsets do not match the embedding rows");
  }
  std::ofstream out = open_out(path);
  out << "j,s";
  for (Eigen::Index c = 0; c < coords.per_point.cols(); ++c) out << ",coord_" << c + 1;
  out << '\n';
  for (std::size_t j = 0; j + 1 < block_offsets.size(); ++j) {
    for (std::size_t r = block_offsets[j]; r < block_offsets[j + 1]; ++r) {
      out << j << ',' << r - block_offsets[j];
      for (Eigen::Index c = 0; c < coords.per_point.cols(); ++c) {
        out << ',' << format_real(coords.per_point(static_cast<Eigen::Index>(r), c));
      }
      out << '\n';
    }
  }
  finish(out, path);
}

EmbeddingCoordinates read_hdm_csv(const fs::path& path) {
  const auto rows = read_rows(path, ',');
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "j") {
    io_fail(path, "missing CSV header");
  }
  const std::size_t cols = rows[0].size() - 2;
  EmbeddingCoordinates coords;
  coords.per_point.resize(static_cast<Eigen::Index>(rows.size() - 1),
                          static_cast<Eigen::Index>(cols));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    expect_columns(path, rows[k], cols + 2, k);
    for (std::size_t c = 0; c < cols; ++c) {
      coords.per_point(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(c)) =
          parse_real(path, rows[k][c + 2]);
    }
  }
  return coords;
}

void write_hbdm_csv(const fs::path& path, const BaseEmbeddingCoordinates& coords) {
  const auto mm = coords.per_fibre.cols();
  const auto m = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(mm))));
  std::ofstream out = open_out(path);
  out << 'j';
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k < m; ++k) out << ",entry_" << l + 1 << '_' << k + 1;
  }
  out << '\n';
  for (Eigen::Index j = 0; j < coords.per_fibre.rows(); ++j) {
    out << j;
    for (Eigen::Index c = 0; c < mm; ++c) out << ',' << format_real(coords.per_fibre(j, c));
    out << '\n';
  }
  finish(out, path);
}

void write_section(const fs::path& path, const PointCloud& base,
                   const Eigen::MatrixXd& vectors,
                   const std::vector<double>& angle_errors) {
  if (vectors.cols() != base.cols() ||
      angle_errors.size() != static_cast<std::size_t>(base.cols())) {
    throw_invalid("write_section: inconsistent section sizes");
  }
  std::ofstream out = open_out(path);
  for (Eigen::Index k = 0; k < base.cols(); ++k) {
    out << k;
    for (int d = 0; d < 3; ++d) out << ' ' << format_real(base(d, k));
    for (int d = 0; d < 3; ++d) out << ' ' << format_real(vectors(d, k));
    out << ' ' << format_real(angle_errors[static_cast<std::size_t>(k)]) << '\n';
  }
  finish(out, path);
}

}  // namespace hypolap::io
