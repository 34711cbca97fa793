#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hypolap/errors.hpp"
#include "hypolap/oracle.hpp"

using namespace hypolap;
using namespace hypolap::oracle;

namespace {
constexpr double pi = std::numbers::pi;

bundle::KernelConfig compact(double eps, double delta) {
  bundle::KernelConfig cfg;
  cfg.family = bundle::KernelFamily::compact_product;
  cfg.eps = eps;
  cfg.delta = delta;
  return cfg;
}
}  // namespace

TEST_CASE("reference multiplicities") {
  CHECK(reference_multiplicities(Regime::horizontal) == std::vector<std::size_t>{1, 6, 13});
  CHECK(reference_multiplicities(Regime::total) == std::vector<std::size_t>{1, 9, 25});
  CHECK(reference_multiplicities(Regime::base) == std::vector<std::size_t>{1, 3, 5});
}

TEST_CASE("sphere spectrum") {
  const auto s = sphere_spectrum(2);
  REQUIRE(s.entries.size() == 3);
  CHECK(s.entries[0] == std::pair<double, std::size_t>{0.0, 1});
  CHECK(s.entries[1] == std::pair<double, std::size_t>{2.0, 3});
  CHECK(s.entries[2] == std::pair<double, std::size_t>{6.0, 5});
  CHECK(s.multiplicities() == reference_multiplicities(Regime::base));
  CHECK(s.entries[2].first / s.entries[1].first == 3.0);
}

TEST_CASE("bundle spectra reproduce the three multiplicity regimes") {
  // Horizontal only: l(l+1) - k^2.
  auto h = bundle_spectrum(1.0, 0.0, 6).multiplicities();
  h.resize(3);
  CHECK(h == reference_multiplicities(Regime::horizontal));
  // Equal weights: the Casimir l(l+1) with multiplicity (2l+1)^2.
  auto t = bundle_spectrum(1.0, 1.0, 6).multiplicities();
  t.resize(3);
  CHECK(t == reference_multiplicities(Regime::total));
  // Heavy vertical weight: only k = 0 survives at the bottom.
  auto b = bundle_spectrum(1.0, 1000.0, 6).multiplicities();
  b.resize(3);
  CHECK(b == reference_multiplicities(Regime::base));
}

TEST_CASE("UT S^2 angles round trip") {
  for (double theta : {0.3, 1.2, 2.7}) {
    for (double phi : {-2.0, 0.5, 3.0}) {
      for (double psi : {-1.0, 0.0, 2.5}) {
        const auto p = utm_point(theta, phi, psi);
        CHECK(geometry::is_unit_tangent(p));
        const auto a = utm_angles(p);
        CHECK(a.theta == doctest::Approx(theta));
        CHECK(a.phi == doctest::Approx(phi));
        CHECK(a.psi == doctest::Approx(psi));
      }
    }
  }
  for (const auto& p : sample_utm_uniform(100, RngSeed{4})) CHECK(geometry::is_unit_tangent(p));
}

TEST_CASE("quadrature grid") {
  UtmGrid g;
  CHECK(g.liouville_volume() == doctest::Approx(8.0 * pi * pi).epsilon(1e-12));
  g.rule = ThetaRule::midpoint;
  CHECK(g.liouville_volume() == doctest::Approx(8.0 * pi * pi).epsilon(1e-3));
  // Second-order convergence of the midpoint rule.
  UtmGrid coarse = g;
  coarse.n_theta = 16;
  UtmGrid fine = g;
  fine.n_theta = 32;
  const double ec = std::abs(coarse.liouville_volume() - 8.0 * pi * pi);
  const double ef = std::abs(fine.liouville_volume() - 8.0 * pi * pi);
  CHECK(ec / ef == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("quadrature operator fixes constants and rejects coarse grids") {
  UtmGrid g{32, 64, 16, ThetaRule::cell_exact};
  const auto pts = sample_utm_uniform(10, RngSeed{1});
  const auto cfg = compact(0.3, 0.5);
  for (double v : quadrature_operator_apply([](const geometry::UnitTangent&) { return 1.0; },
                                            cfg, g, pts)) {
    CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(quadrature_operator_apply([](const geometry::UnitTangent&) { return 1.0; },
                                            compact(0.001, 0.5), g, pts),
                  InvalidArgument);
}

TEST_CASE("quadrature operator is inert to alpha under uniform density") {
  UtmGrid g{32, 64, 16, ThetaRule::cell_exact};
  const auto pts = sample_utm_uniform(8, RngSeed{2});
  const UtmFunction f = [](const geometry::UnitTangent& p) {
    return std::cos(utm_angles(p).theta) + 0.3 * p.vector.x();
  };
  auto cfg = compact(0.3, 0.5);
  cfg.alpha = 0.0;
  const auto a = quadrature_operator_apply(f, cfg, g, pts);
  cfg.alpha = 1.0;
  const auto b = quadrature_operator_apply(f, cfg, g, pts);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
}

TEST_CASE("base regime: (Hf - f)/eps is proportional to the sphere Laplacian of cos theta") {
  const UtmGrid g{48, 96, 16, ThetaRule::cell_exact};
  const auto cfg = compact(0.1, 10.0);
  const auto pts = sample_utm_uniform(60, RngSeed{5});
  const UtmFunction f = [](const geometry::UnitTangent& p) { return p.base.z(); };
  const auto hf = quadrature_operator_apply(f, cfg, g, pts);
  std::vector<double> lhs, rhs;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    lhs.push_back((hf[k] - f(pts[k])) / cfg.eps);
    rhs.push_back(-2.0 * f(pts[k]));
  }
  CHECK(squared_correlation(lhs, rhs) > 0.98);
}

TEST_CASE("vertical regime on a fibre eigenfunction of the full operator") {
  // f = v . a is an eigenfunction of both the horizontal and the vertical
  // Laplacians (eigenvalue -1 each), so the fibre term is visible directly.
  const UtmGrid g{64, 128, 32, ThetaRule::cell_exact};
  const auto cfg = compact(0.1, 0.001);
  const auto pts = sample_utm_uniform(40, RngSeed{6});
  const Vec3 a = Vec3(0.2, -0.5, 0.7).normalized();
  const UtmFunction f = [a](const geometry::UnitTangent& p) { return p.vector.dot(a); };
  const auto hf = quadrature_operator_apply(f, cfg, g, pts);
  std::vector<double> lhs, rhs;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    lhs.push_back((hf[k] - f(pts[k])) / cfg.delta);
    rhs.push_back(-f(pts[k]));
  }
  CHECK(squared_correlation(lhs, rhs) > 0.98);
}

TEST_CASE("sampled operator fixes constants") {
  const auto samples =
      bundle::sample_exact_bundle(300, 8, geometry::FibreSampling::random, RngSeed{3});
  auto cfg = compact(0.3, 0.8);
  const auto pts = sample_utm_uniform(5, RngSeed{9});
  for (double alpha : {0.0, 1.0}) {
    cfg.alpha = alpha;
    for (double v : sampled_operator_apply([](const geometry::UnitTangent&) { return 2.5; },
                                           samples, cfg, pts)) {
      CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
    }
  }
}

TEST_CASE("statistics helpers") {
  CHECK(squared_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(squared_correlation({1, 2, 3}, {-1, -2, -3}) == doctest::Approx(1.0));
  CHECK(loglog_slope({1, 2, 4}, {3, 24, 192}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(loglog_slope({1, 2}, {0, 1}), InvalidArgument);
  CHECK_THROWS_AS(squared_correlation({1}, {1}), InvalidArgument);
}

TEST_CASE("transport expansion residual") {
  const Vec3 x = Vec3::UnitZ();
  const Vec3 theta = Vec3::UnitX();
  const std::vector<double> ts = {0.04, 0.08, 0.16, 0.32};
  for (const Vec3& v : {Vec3(Vec3::UnitY()), Vec3(0.6, 0.8, 0.0), Vec3(Vec3::UnitX())}) {
    const auto r = transport_taylor_residual(x, theta, v, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      // Third-order remainder: bounded by C t^3 and vanishing as t -> 0.
      CHECK(r[k] <= ts[k] * ts[k] * ts[k]);
    }
    const auto tiny = transport_taylor_residual(x, theta, v, {1e-3});
    CHECK(tiny[0] < 1e-9);
  }
  // The first-order term: at small t the transported coefficients are v.
  const Eigen::Vector2d c = transport_normal_coefficients(x, theta, Vec3::UnitY(), 1e-4);
  CHECK((c - Eigen::Vector2d(0.0, 1.0)).norm() < 1e-8);
  CHECK_THROWS_AS(transport_normal_coefficients(x, Vec3::UnitZ(), Vec3::UnitY(), 0.1),
                  GeometryError);
}
