#include "hypolap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <string>

#include "hypolap/errors.hpp"

namespace hypolap::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-37) is below 1e-16: Gaussian profile terms beyond it are dropped.
constexpr double kGaussianCutoff = 37.0;

double profile_cutoff(bundle::KernelFamily family) {
  return family == bundle::KernelFamily::compact_product ? 1.0 : kGaussianCutoff;
}

// Largest fibre offset angle with a non-negligible kernel value.
double fibre_support_angle(const bundle::KernelConfig& cfg) {
  const double b_max = profile_cutoff(cfg.family) * cfg.delta;
  if (cfg.fibre_metric == bundle::FibreMetric::geodesic) {
    return std::min(kPi, std::sqrt(b_max));
  }
  const double half_chord = 0.5 * std::sqrt(b_max);
  return half_chord >= 1.0 ? kPi : 2.0 * std::asin(half_chord);
}

// Transport from x to y; identity for coincident points. Returns false for
// antipodal pairs.
bool transport_or_identity(const Vec3& x, const Vec3& y, Mat3& out) {
  if (x.cross(y).norm() >= 1e-12) {
    out = geometry::transport_rotation(x, y);
    return true;
  }
  if (x.dot(y) < 0.0) return false;
  out.setIdentity();
  return true;
}

}  // namespace

std::vector<std::size_t> reference_multiplicities(Regime regime) {
  switch (regime) {
    case Regime::horizontal:
      return {1, 6, 13};
    case Regime::total:
      return {1, 9, 25};
    case Regime::base:
      return {1, 3, 5};
  }
  return {};
}

std::vector<std::size_t> AnalyticSpectrum::multiplicities() const {
  std::vector<std::size_t> out;
  for (const auto& e : entries) out.push_back(e.second);
  return out;
}

AnalyticSpectrum sphere_spectrum(std::size_t l_max) {
  AnalyticSpectrum s;
  for (std::size_t l = 0; l <= l_max; ++l) {
    s.entries.emplace_back(static_cast<double>(l * (l + 1)), 2 * l + 1);
  }
  return s;
}

AnalyticSpectrum bundle_spectrum(double a, double b, std::size_t l_max) {
  std::vector<std::pair<double, std::size_t>> raw;
  for (std::size_t l = 0; l <= l_max; ++l) {
    const auto ll = static_cast<long>(l);
    for (long k = -ll; k <= ll; ++k) {
      const double value = a * static_cast<double>(ll * (ll + 1) - k * k) +
                           b * static_cast<double>(k * k);
      raw.emplace_back(value, 2 * l + 1);
    }
  }
  std::sort(raw.begin(), raw.end());
  AnalyticSpectrum s;
  for (const auto& [value, mult] : raw) {
    if (!s.entries.empty() &&
        std::abs(value - s.entries.back().first) <=
            1e-12 * std::max(1.0, std::abs(value))) {
      s.entries.back().second += mult;
    } else {
      s.entries.emplace_back(value, mult);
    }
  }
  return s;
}

UtmAngles utm_angles(const geometry::UnitTangent& p) {
  UtmAngles a;
  const Vec3& x = p.base;
  a.theta = std::acos(std::clamp(x.z(), -1.0, 1.0));
  a.phi = std::atan2(x.y(), x.x());
  const Vec3 e_theta(std::cos(a.theta) * std::cos(a.phi),
                     std::cos(a.theta) * std::sin(a.phi), -std::sin(a.theta));
  const Vec3 e_phi(-std::sin(a.phi), std::cos(a.phi), 0.0);
  a.psi = std::atan2(p.vector.dot(e_phi), p.vector.dot(e_theta));
  return a;
}

geometry::UnitTangent utm_point(double theta, double phi, double psi) {
  const Vec3 x(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
               std::cos(theta));
  const Vec3 e_theta(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                     -std::sin(theta));
  const Vec3 e_phi(-std::sin(phi), std::cos(phi), 0.0);
  return {x, std::cos(psi) * e_theta + std::sin(psi) * e_phi};
}

std::vector<geometry::UnitTangent> sample_utm_uniform(std::size_t n, RngSeed seed) {
  const auto bases = geometry::sample_sphere_uniform(n, derive_seed(seed, Stream::base_points));
  const RngSeed fibre_seed = derive_seed(seed, Stream::fibre_samples);
  std::vector<geometry::UnitTangent> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.push_back(geometry::sample_fibre_circle(bases[j], 1, geometry::FibreSampling::random,
                                                derive_seed(fibre_seed, j))[0]);
  }
  return out;
}

double UtmGrid::theta(std::size_t i) const {
  return (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(n_theta);
}

double UtmGrid::phi(std::size_t k) const {
  return 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_phi);
}

double UtmGrid::psi(std::size_t m) const {
  return 2.0 * kPi * static_cast<double>(m) / static_cast<double>(n_psi);
}

double UtmGrid::base_weight(std::size_t i) const {
  const double h = kPi / static_cast<double>(n_theta);
  const double dphi = 2.0 * kPi / static_cast<double>(n_phi);
  const double s = std::sin(theta(i));
  return (rule == ThetaRule::cell_exact ? 2.0 * s * std::sin(0.5 * h) : s * h) * dphi;
}

double UtmGrid::fibre_weight() const { return 2.0 * kPi / static_cast<double>(n_psi); }

Vec3 UtmGrid::base_node(std::size_t i, std::size_t k) const {
  const double t = theta(i);
  const double p = phi(k);
  return Vec3(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
}

double UtmGrid::liouville_volume() const {
  double total = 0.0;
  for (std::size_t i = 0; i < n_theta; ++i) {
    total += base_weight(i);
  }
  return total * static_cast<double>(n_phi) * fibre_weight() * static_cast<double>(n_psi);
}

double UtmGrid::base_spacing() const {
  return std::max(kPi / static_cast<double>(n_theta), 2.0 * kPi / static_cast<double>(n_phi));
}

std::vector<double> quadrature_operator_apply(
    const UtmFunction& f, const bundle::KernelConfig& cfg, const UtmGrid& grid,
    const std::vector<geometry::UnitTangent>& eval_points) {
  cfg.validate();
  if (grid.n_theta < 1 || grid.n_phi < 1) throw_invalid("quadrature grid is empty");
  const double support = 2.0 * std::sqrt(cfg.eps);
  const double spacing = grid.base_spacing();
  if (support < 8.0 * spacing) {
    const auto needed = static_cast<std::size_t>(std::ceil(8.0 * kPi / support));
    throw_invalid("quadrature grid under-resolves eps = " + std::to_string(cfg.eps) +
                  ": base spacing " + std::to_string(spacing) + " needs n_theta >= " +
                  std::to_string(needed) + " and n_phi >= " + std::to_string(2 * needed));
  }
  if (grid.n_psi < 8) throw_invalid("quadrature grid needs at least 8 fibre nodes");

  const double cutoff = profile_cutoff(cfg.family);
  const double beta_max = fibre_support_angle(cfg);
  const double dbeta = 2.0 * beta_max / static_cast<double>(grid.n_psi);
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  for (std::size_t i = 0; i < grid.n_theta; ++i) {
    for (std::size_t k = 0; k < grid.n_phi; ++k) {
      nodes.push_back(grid.base_node(i, k));
      weights.push_back(grid.base_weight(i));
    }
  }

  std::vector<double> out(eval_points.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(eval_points.size()); ++e) {
    try {
      const auto& p = eval_points[static_cast<std::size_t>(e)];
      double num = 0.0;
      double den = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        const Vec3& y = nodes[q];
        const double a = (p.base - y).squaredNorm() / cfg.eps;
        if (a >= cutoff) continue;
        Mat3 rot;
        if (!transport_or_identity(p.base, y, rot)) continue;
        const Vec3 u = rot * p.vector;
        const Vec3 u_perp = y.cross(u);
        for (std::size_t m = 0; m < grid.n_psi; ++m) {
          const double beta = -beta_max + (static_cast<double>(m) + 0.5) * dbeta;
          const Vec3 w = std::cos(beta) * u + std::sin(beta) * u_perp;
          const double b = bundle::fibre_sq_distance(cfg.fibre_metric, u, w) / cfg.delta;
          const double k = bundle::kernel_profile(cfg.family, a, b) * weights[q] * dbeta;
          if (k == 0.0) continue;
          num += k * f({y, w});
          den += k;
        }
      }
      if (!(den > 0.0)) {
        throw Error("quadrature kernel mass vanished at evaluation point " +
                    std::to_string(e));
      }
      out[static_cast<std::size_t>(e)] = num / den;
    } catch (...) {
#pragma omp critical(quadrature_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> sampled_operator_apply(
    const UtmFunction& f, const bundle::BundleSampleSet& samples,
    const bundle::KernelConfig& cfg,
    const std::vector<geometry::UnitTangent>& eval_points) {
  cfg.validate();
  if (samples.mode != bundle::SampleMode::exact) {
    throw_invalid("sampled_operator_apply needs exact tangent samples");
  }
  const double cutoff = profile_cutoff(cfg.family);
  const std::size_t nb = samples.num_fibres();

  // Kernel sum over all samples of the point (x, v), excluding fibre `skip`.
  const auto kernel_mass = [&](const Vec3& x, const Vec3& v, std::size_t skip) {
    double mass = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      if (i == skip) continue;
      const Vec3 y = samples.base.col(static_cast<Eigen::Index>(i));
      const double a = (x - y).squaredNorm() / cfg.eps;
      if (a >= cutoff) continue;
      Mat3 rot;
      if (!transport_or_identity(x, y, rot)) continue;
      const Vec3 u = rot * v;
      const Eigen::MatrixXd& fib = samples.fibres[i];
      for (Eigen::Index r = 0; r < fib.cols(); ++r) {
        const double b = bundle::fibre_sq_distance(cfg.fibre_metric, u, fib.col(r)) / cfg.delta;
        mass += bundle::kernel_profile(cfg.family, a, b);
      }
    }
    return mass;
  };

  // Density estimates at the samples reachable from some evaluation point.
  const std::vector<std::size_t> offsets = samples.block_offsets();
  std::vector<double> density(offsets.back(), 1.0);
  if (cfg.alpha > 0.0) {
    std::vector<char> needed(nb, 0);
    for (const auto& p : eval_points) {
      for (std::size_t j = 0; j < nb; ++j) {
        const Vec3 y = samples.base.col(static_cast<Eigen::Index>(j));
        if ((p.base - y).squaredNorm() / cfg.eps < cutoff) needed[j] = 1;
      }
    }
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(nb); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      if (!needed[j]) continue;
      const Vec3 xi = samples.base.col(static_cast<Eigen::Index>(j));
      for (Eigen::Index s = 0; s < samples.fibres[j].cols(); ++s) {
        density[offsets[j] + static_cast<std::size_t>(s)] =
            kernel_mass(xi, samples.fibres[j].col(s), j);
      }
    }
  }

  std::vector<double> out(eval_points.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(eval_points.size()); ++e) {
    try {
      const auto& p = eval_points[static_cast<std::size_t>(e)];
      double num = 0.0;
      double den = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        const Vec3 y = samples.base.col(static_cast<Eigen::Index>(j));
        const double a = (p.base - y).squaredNorm() / cfg.eps;
        if (a >= cutoff) continue;
        Mat3 rot;
        if (!transport_or_identity(p.base, y, rot)) continue;
        const Vec3 u = rot * p.vector;
        const Eigen::MatrixXd& fib = samples.fibres[j];
        for (Eigen::Index s = 0; s < fib.cols(); ++s) {
          const Vec3 w = fib.col(s);
          const double b = bundle::fibre_sq_distance(cfg.fibre_metric, u, w) / cfg.delta;
          double k = bundle::kernel_profile(cfg.family, a, b);
          if (k == 0.0) continue;
          const double q = density[offsets[j] + static_cast<std::size_t>(s)];
          if (cfg.alpha > 0.0) {
            if (!(q > 0.0)) throw Error("sample density estimate vanished");
            k /= std::pow(q, cfg.alpha);
          }
          num += k * f({y, w});
          den += k;
        }
      }
      if (!(den > 0.0)) {
        throw Error("no samples inside the kernel support of evaluation point " +
                    std::to_string(e));
      }
      out[static_cast<std::size_t>(e)] = num / den;
    } catch (...) {
#pragma omp critical(sampled_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double squared_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw_invalid("squared_correlation needs two series of equal length >= 2");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw_invalid("loglog_slope needs two series of equal length >= 2");
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw_invalid("loglog_slope needs positive data");
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  return sxy / sxx;
}

namespace {

struct NormalChart {
  Vec3 e1;  // theta
  Vec3 e2;  // x cross theta
};

NormalChart normal_chart(const Vec3& x, const Vec3& theta) {
  if (!geometry::on_sphere(x, 1e-10) || std::abs(theta.norm() - 1.0) > 1e-10 ||
      std::abs(theta.dot(x)) > 1e-10) {
    throw GeometryError("transport expansion needs a unit direction tangent at x");
  }
  return {theta, x.cross(theta)};
}

}  // namespace

Eigen::Vector2d transport_normal_coefficients(const Vec3& x, const Vec3& theta,
                                              const Vec3& v, double t) {
  const NormalChart chart = normal_chart(x, theta);
  if (!(t > 0.0 && t < kPi)) throw_invalid("transport expansion needs t in (0, pi)");
  const Vec3 y = geometry::exp_map(x, t * theta);
  const Vec3 moved = geometry::parallel_transport(x, y, v);
  // Differential of exp_x at s = t theta applied to the chart basis vectors:
  // radial direction -sin t x + cos t theta, transverse (sin t / t) e2.
  Eigen::Matrix<double, 3, 2> jac;
  jac.col(0) = -std::sin(t) * x + std::cos(t) * chart.e1;
  jac.col(1) = (std::sin(t) / t) * chart.e2;
  return jac.colPivHouseholderQr().solve(moved);
}

Eigen::Vector2d transport_expansion_coefficients(const Vec3& x, const Vec3& theta,
                                                 const Vec3& v, double t) {
  const NormalChart chart = normal_chart(x, theta);
  const Eigen::Vector2d vc(v.dot(chart.e1), v.dot(chart.e2));
  const Eigen::Vector2d th(1.0, 0.0);
  // Orthonormal chart at the center: indices are raised with the identity.
  const auto riemann = [](int a, int b, int c, int d) {
    return static_cast<double>((a == c) * (b == d)) -
           static_cast<double>((a == d) * (b == c));
  };
  Eigen::Vector2d out = vc;
  for (int j = 0; j < 2; ++j) {
    double acc = 0.0;
    for (int k = 0; k < 2; ++k) {
      for (int s = 0; s < 2; ++s) {
        for (int l = 0; l < 2; ++l) {
          acc += th(k) * th(s) * vc(l) * (riemann(l, s, k, j) + riemann(k, s, l, j));
        }
      }
    }
    out(j) -= t * t / 6.0 * acc;
  }
  return out;
}

std::vector<double> transport_taylor_residual(const Vec3& x, const Vec3& theta,
                                              const Vec3& v,
                                              const std::vector<double>& t_values) {
  std::vector<double> out;
  out.reserve(t_values.size());
  for (double t : t_values) {
    out.push_back((transport_normal_coefficients(x, theta, v, t) -
                   transport_expansion_coefficients(x, theta, v, t))
                      .norm());
  }
  return out;
}

}  // namespace hypolap::oracle
