#pragma once

// Reference values for validating the discrete constructions: closed-form
// spectra, quadrature of the continuous bundle diffusion operator on UT S^2,
// the sampled operator at arbitrary points, and the second-order expansion
// of parallel transport in geodesic normal coordinates.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "hypolap/bundle_graph.hpp"
#include "hypolap/geometry.hpp"

namespace hypolap::oracle {

enum class Regime { horizontal, total, base };

// Leading eigenvalue multiplicities of the limiting operators on UT S^2.
std::vector<std::size_t> reference_multiplicities(Regime regime);

struct AnalyticSpectrum {
  std::vector<std::pair<double, std::size_t>> entries;  // (eigenvalue, multiplicity)

  std::vector<std::size_t> multiplicities() const;
};

// l(l+1) with multiplicity 2l+1 for l = 0..l_max.
AnalyticSpectrum sphere_spectrum(std::size_t l_max);

// Spectrum of a * (horizontal Laplacian) + b * (vertical Laplacian) on
// UT S^2 = SO(3): eigenvalue a (l(l+1) - k^2) + b k^2 for |k| <= l, each with
// multiplicity 2l+1, for l = 0..l_max. Equal values are merged (relative
// tolerance 1e-12) and the list is sorted ascending.
AnalyticSpectrum bundle_spectrum(double a, double b, std::size_t l_max);

// Angles of a unit tangent: base polar angle theta, azimuth phi, and fibre
// angle psi measured from d/dtheta towards d/dphi / sin(theta).
struct UtmAngles {
  double theta = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

UtmAngles utm_angles(const geometry::UnitTangent& p);
geometry::UnitTangent utm_point(double theta, double phi, double psi);

// Uniformly random unit tangents.
std::vector<geometry::UnitTangent> sample_utm_uniform(std::size_t n, RngSeed seed);

enum class ThetaRule {
  cell_exact,  // 2 sin(theta_i) sin(h/2): exact cell areas
  midpoint,    // sin(theta_i) h
};

// Product grid on UT S^2 with half-cell offsets in theta.
struct UtmGrid {
  std::size_t n_theta = 64;
  std::size_t n_phi = 128;
  std::size_t n_psi = 64;
  ThetaRule rule = ThetaRule::cell_exact;

  double theta(std::size_t i) const;
  double phi(std::size_t k) const;
  double psi(std::size_t m) const;
  double base_weight(std::size_t i) const;  // includes the phi spacing
  double fibre_weight() const;
  Vec3 base_node(std::size_t i, std::size_t k) const;
  // Sum of all node weights; 8 pi^2 for the exact rule.
  double liouville_volume() const;
  // Largest base node spacing (the azimuthal spacing at the equator or the
  // polar spacing).
  double base_spacing() const;
};

using UtmFunction = std::function<double(const geometry::UnitTangent&)>;

// Continuous operator f -> int K f / int K at the evaluation points by
// quadrature over base nodes of `grid` and, on each fibre, over n_psi nodes
// spanning the kernel support around the transported evaluation vector.
// Uniform density makes the alpha normalization cancel. Throws
// InvalidArgument when the base grid resolves sqrt(eps) with fewer than 8
// nodes across the kernel support.
std::vector<double> quadrature_operator_apply(
    const UtmFunction& f, const bundle::KernelConfig& cfg, const UtmGrid& grid,
    const std::vector<geometry::UnitTangent>& eval_points);

// Sampled operator at arbitrary points: sum_{j,s} K_alpha f(xi_j, x_js) over
// all exact samples divided by sum K_alpha, with the alpha normalization
// using kernel sums over the samples (no nearest-neighbor truncation).
std::vector<double> sampled_operator_apply(
    const UtmFunction& f, const bundle::BundleSampleSet& samples,
    const bundle::KernelConfig& cfg,
    const std::vector<geometry::UnitTangent>& eval_points);

// Squared Pearson correlation of two equally long series.
double squared_correlation(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Coefficients, in geodesic normal coordinates at x with basis (theta,
// x cross theta), of the parallel transport of v along t -> exp_x(t theta).
Eigen::Vector2d transport_normal_coefficients(const Vec3& x, const Vec3& theta,
                                              const Vec3& v, double t);

// Second-order expansion v^j - t^2/6 theta^k theta^s v^l (R_lsk^j + R_ksl^j)
// with the unit-sphere curvature tensor R_abcd = g_ac g_bd - g_ad g_bc.
Eigen::Vector2d transport_expansion_coefficients(const Vec3& x, const Vec3& theta,
                                                 const Vec3& v, double t);

// |exact - expansion| for each t.
std::vector<double> transport_taylor_residual(const Vec3& x, const Vec3& theta,
                                              const Vec3& v,
                                              const std::vector<double>& t_values);

}  // namespace hypolap::oracle
