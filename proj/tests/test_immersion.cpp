#include "lmcf/fixtures.hpp"
#include "lmcf/immersion.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lmcf;

namespace {

constexpr double kPi = std::numbers::pi;
const SignatureSpace R21(2, 1);
const SignatureSpace R31(3, 1);

double max_rel(const Vec& a, const Vec& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

double max_rel(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

GaussImmersion perturbed_curve(int m) {
  return gauss_fixture(R21, GridSpec::curve(m), parse_mode_terms("const:1 cos2:0.05 sin3:0.02"),
                       {parse_mode_terms("sin1:0.05 cos2:0.03")});
}

GaussImmersion perturbed_surface(int mp, int mt) {
  return gauss_fixture(R31, GridSpec::sphere(mp, mt), parse_mode_terms("const:1 Y2_0:0.05 Y3_1:0.02"),
                       {parse_mode_terms("Y1_1:0.05 Y2_-2:0.03")});
}

}  // namespace

TEST(ComputeGeometry, CircleCurvature) {
  for (double r : {0.5, 1.0, 3.0}) {
    const VertexImmersion im = circle_fixture(R21, r, 64);
    const GeometryCache geo = compute_geometry(im);
    for (int s = 0; s < 64; ++s) {
      EXPECT_NEAR(std::sqrt(geo.H2(s)), 1.0 / r, 1e-12 / r);
      // Inward: H = -F / r^2.
      EXPECT_LT((geo.H.col(s) + im.positions.col(s) / (r * r)).norm(), 1e-11 / r);
    }
    EXPECT_NEAR(geo.area, 2 * kPi * r, 1e-12 * r);
  }
}

TEST(ComputeGeometry, SphereCurvature) {
  for (double r : {0.5, 2.0}) {
    const VertexImmersion im = sphere_fixture(R31, r, GridSpec::sphere(16, 32));
    const GeometryCache geo = compute_geometry(im);
    for (int s = 0; s < geo.samples(); ++s) {
      EXPECT_NEAR(std::sqrt(geo.H2(s)), 2.0 / r, 1e-9 / r);
      EXPECT_LT((geo.H.col(s) + 2.0 * im.positions.col(s) / (r * r)).norm(), 1e-9 / r);
    }
    EXPECT_NEAR(geo.area, 4 * kPi * r * r, 1e-10);
  }
}

TEST(ComputeGeometry, GammaTangentAndCurvatureVector) {
  const VertexImmersion im = paper_gamma_fixture(256);
  const GeometryCache geo = compute_geometry(im);
  EXPECT_NEAR(geo.g[0](0), 3.0, 1e-12);
  // Curvature vector at theta = 0 from the finite-difference oracle, frozen value (-2/3, 0, 0).
  const Vec fd = oracle::gamma_fd_curvature_vector(0.0);
  Vec frozen(3);
  frozen << -2.0 / 3.0, 0.0, 0.0;
  EXPECT_LT((fd - frozen).norm(), 1e-7);
  EXPECT_LT((geo.h[0].col(0) / geo.g[0](0) - frozen).norm(), 1e-12);
  EXPECT_LT((geo.H.col(0) - frozen).norm(), 1e-12);
  for (double th : {0.3, 1.7, 4.4}) {
    const int s = static_cast<int>(std::round(th / (2 * kPi) * 256)) % 256;
    const Vec ref = oracle::gamma_fd_curvature_vector(im.grid.theta(s));
    EXPECT_LT((geo.H.col(s) - ref).norm(), 1e-7);
  }
}

TEST(ComputeGeometry, CacheInvariants) {
  for (const GeometryCache& geo :
       {compute_geometry(paper_gamma_fixture(128)), compute_geometry(reconstruct(perturbed_surface(16, 32)))}) {
    const int n = geo.n();
    for (int s = 0; s < geo.samples(); ++s) {
      const Mat gi = geo.inverse_metric(s);
      Vec H = Vec::Zero(geo.space.dim());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) H += gi(i, j) * geo.h[sym_index(i, j)].col(s);
      EXPECT_LE((H - geo.H.col(s)).norm(), 1e-10 * std::max(1.0, H.norm()));
      EXPECT_LT((geo.metric(s) * gi - Mat::Identity(n, n)).norm(), 1e-12);
    }
    EXPECT_LT(gauss_relation_residual(geo), 1e-8);
  }
}

TEST(ComputeGeometry, TimelikeTangentRaisesDegenerateMetric) {
  const GridSpec g = GridSpec::curve(64);
  Mat P(3, 64);
  for (int s = 0; s < 64; ++s) {
    const double t = g.theta(s);
    P.col(s) << std::cos(t), std::sin(t), 1.2 * std::sin(t);
  }
  try {
    compute_geometry(VertexImmersion{g, R21, P});
    FAIL() << "expected a degenerate metric";
  } catch (const DegenerateMetricError& e) {
    EXPECT_LT(e.min_eigenvalue, 0.0);
    const double t = g.theta(e.sample);
    EXPECT_LT(1.0 - 1.44 * std::cos(t) * std::cos(t), 0.0);
  }
}

TEST(ToGauss, CenteredAndTranslatedSphere) {
  const VertexImmersion circ = circle_fixture(R21, 1.0, 64);
  const GaussImmersion g0 = to_gauss(circ, LorentzMap::identity(R21));
  EXPECT_LT((g0.sigma.array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LT(g0.eta.cwiseAbs().maxCoeff(), 1e-12);

  Vec c(3);
  c << 0.2, -0.1, 0.0;
  const GaussImmersion g1 = to_gauss(circle_fixture(R21, 1.0, 64, c), LorentzMap::identity(R21));
  for (int s = 0; s < 64; ++s) EXPECT_NEAR(g1.sigma(s), 1.0 + c.head(2).dot(g1.grid.z(s)), 1e-10);

  Vec c3(4);
  c3 << 0.1, 0.05, -0.2, 0.0;
  const GridSpec sg = GridSpec::sphere(12, 24);
  const GaussImmersion g2 = to_gauss(sphere_fixture(R31, 1.0, sg, c3), LorentzMap::identity(R31));
  for (int s = 0; s < sg.size(); ++s) EXPECT_NEAR(g2.sigma(s), 1.0 + c3.head(3).dot(sg.z(s)), 1e-8);
  EXPECT_LT(g2.eta.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ToGauss, GammaSupportData) {
  const GaussImmersion g = to_gauss(paper_gamma_fixture(128), LorentzMap::identity(R21));
  for (int s = 0; s < 128; ++s) {
    EXPECT_NEAR(g.sigma(s), 2.0, 1e-10);
    EXPECT_NEAR(g.eta(0, s), std::sin(g.grid.theta(s)), 1e-10);
  }
}

TEST(ToGauss, RoundTripConvergesOnGamma) {
  // gamma's Gauss map is the identity in theta, so the reconstruction must land on gamma(theta_j).
  auto err = [](int m) {
    const VertexImmersion rt = reconstruct(to_gauss(paper_gamma_fixture(m), LorentzMap::identity(R21)));
    double e = 0.0;
    for (int s = 0; s < m; ++s) e = std::max(e, (rt.positions.col(s) - oracle::gamma_point(rt.grid.theta(s))).norm());
    return e;
  };
  const double e64 = err(64), e128 = err(128);
  EXPECT_LE(e64, 10.0 / (64.0 * 64.0));
  EXPECT_LE(e128, 10.0 / (128.0 * 128.0));
}

TEST(ToGauss, RoundTripConvergesOnPerturbedCurve) {
  // Vertex samples relabelled by a non-uniform parameter shift, then inverted.
  auto err = [](int m) {
    const GaussImmersion gim = perturbed_curve(m);
    VertexImmersion im = reconstruct(gim);
    const FourierInterpolant fi(im.grid, im.positions);
    for (int s = 0; s < m; ++s) {
      const double t = im.grid.theta(s);
      im.positions.col(s) = fi.value(t + 0.2 * std::sin(t));
    }
    const GaussImmersion back = to_gauss(im, LorentzMap::identity(R21));
    return std::max((back.sigma - gim.sigma).cwiseAbs().maxCoeff(), (back.eta - gim.eta).cwiseAbs().maxCoeff());
  };
  EXPECT_LE(err(64), 10.0 / (64.0 * 64.0));
  EXPECT_LE(err(128), 10.0 / (128.0 * 128.0));
}

TEST(Reconstruct, SpheresAndGamma) {
  const GaussImmersion unit = gauss_fixture(R21, GridSpec::curve(32), parse_mode_terms("const:1"), {});
  const VertexImmersion c = reconstruct(unit);
  for (int s = 0; s < 32; ++s) {
    EXPECT_LT((c.positions.col(s).head(2) - c.grid.z(s)).norm(), 1e-14);
    EXPECT_EQ(c.positions(2, s), 0.0);
  }
  const GaussImmersion big = gauss_fixture(R31, GridSpec::sphere(10, 20), parse_mode_terms("const:2.5"), {});
  const VertexImmersion sp = reconstruct(big);
  for (int s = 0; s < sp.samples(); ++s) EXPECT_NEAR(sp.positions.col(s).head(3).norm(), 2.5, 1e-12);

  const GaussImmersion gam = gauss_fixture(R21, GridSpec::curve(64), parse_mode_terms("const:2"), {parse_mode_terms("sin1:1")});
  const VertexImmersion g = reconstruct(gam);
  for (int s = 0; s < 64; ++s) {
    const Vec ref = oracle::gamma_point(g.grid.theta(s));
    EXPECT_NEAR(g.positions.col(s).head(2).dot(g.grid.z(s)), ref.head(2).dot(g.grid.z(s)), 1e-12);
    EXPECT_NEAR(g.positions(2, s), ref(2), 1e-12);
  }
}

TEST(Reconstruct, NonSpacelikeResultRejected) {
  const GaussImmersion bad = gauss_fixture(R21, GridSpec::curve(64), parse_mode_terms("const:1"), {parse_mode_terms("sin1:1.5")});
  EXPECT_THROW(reconstruct(bad), ReconstructionError);
}

TEST(GaussGeometry, RoundData) {
  const GaussImmersion unit = gauss_fixture(R31, GridSpec::sphere(12, 24), parse_mode_terms("const:1"), {});
  const GeometryCache g1 = gauss_geometry(unit);
  for (int s = 0; s < g1.samples(); ++s) EXPECT_NEAR(std::sqrt(g1.H2(s)), 2.0, 1e-10);

  const double r = 1.7;
  const GaussImmersion big = gauss_fixture(R31, GridSpec::sphere(12, 24), parse_mode_terms("const:1.7"), {});
  const GeometryCache g = gauss_geometry(big);
  for (int s = 0; s < g.samples(); ++s) {
    const double sp = std::sin(big.grid.phi(s));
    EXPECT_NEAR(g.g[0](s), r * r, 1e-10);
    EXPECT_NEAR(g.g[1](s), 0.0, 1e-10);
    EXPECT_NEAR(g.g[2](s), r * r * sp * sp, 1e-10);
  }
  const GeometryCache c = gauss_geometry(gauss_fixture(R21, GridSpec::curve(32), parse_mode_terms("const:1"), {}));
  for (int s = 0; s < 32; ++s) EXPECT_NEAR(c.H2(s), 1.0, 1e-12);
}

TEST(GaussGeometry, AgreesWithVertexPipeline) {
  for (const GaussImmersion& gim : {perturbed_curve(128), perturbed_surface(16, 32)}) {
    const GeometryCache a = gauss_geometry(gim);
    const GeometryCache b = compute_geometry(reconstruct(gim));
    for (size_t i = 0; i < a.g.size(); ++i) {
      EXPECT_LT(max_rel(a.g[i], b.g[i]), 1e-6);
      EXPECT_LT(max_rel(a.h[i], b.h[i]), 1e-6);
    }
    EXPECT_LT(max_rel(a.H, b.H), 1e-6);
  }
}

TEST(ApplyLorentz, IdentityScaleAndBoost) {
  const VertexImmersion c = circle_fixture(R21, 1.0, 64);
  const VertexImmersion same = apply_lorentz(c, LorentzMap::identity(R21), 1.0, Vec::Zero(3));
  EXPECT_EQ(same.positions, c.positions);
  const GeometryCache g2 = compute_geometry(apply_lorentz(c, LorentzMap::identity(R21), 2.0, Vec::Zero(3)));
  for (int s = 0; s < 64; ++s) EXPECT_NEAR(std::sqrt(g2.H2(s)), 0.5, 1e-12);
  Vec coeff = Vec::Zero(2);
  coeff(0) = 1.0;
  const VertexImmersion boosted = apply_lorentz(c, boost_exp(R21, coeff, 0.5), 1.0, Vec::Zero(3));
  const GeometryCache gb = compute_geometry(boosted);
  EXPECT_GT(gb.H2_min, 0.0);
  EXPECT_GT(min_pair_separation2(boosted), 0.0);
  EXPECT_THROW(apply_lorentz(c, LorentzMap::identity(R21), 0.0, Vec::Zero(3)), ArgumentError);
}

TEST(CenterOfMass, SymmetricFixtures) {
  EXPECT_LT(center_of_mass(sphere_fixture(R31, 1.0, GridSpec::sphere(12, 24))).norm(), 1e-12);
  Vec c(4);
  c << 0.3, -0.2, 0.1, 0.4;
  EXPECT_LT((center_of_mass(sphere_fixture(R31, 1.0, GridSpec::sphere(12, 24), c)) - c).norm(), 1e-12);
  const VertexImmersion g = paper_gamma_fixture(256);
  // Quadrature oracle: sum gamma(theta) |gamma'(theta)| over the nodes.
  Vec num = Vec::Zero(3);
  double den = 0.0;
  for (int s = 0; s < 256; ++s) {
    const double t = g.grid.theta(s), w = std::sqrt(4.0 - std::cos(t) * std::cos(t));
    num += w * oracle::gamma_point(t);
    den += w;
  }
  EXPECT_LT((num / den).norm(), 1e-14);
  EXPECT_LT(center_of_mass(g).norm(), 1e-13);
}

TEST(Surfaces, CodazziAndGaussEquations) {
  auto residuals = [](int mp, int mt) {
    const GeometryCache geo = compute_geometry(reconstruct(perturbed_surface(mp, mt)));
    return std::pair{codazzi_residual(geo), (intrinsic_curvature(geo) - sectional_curvature(geo)).cwiseAbs().maxCoeff()};
  };
  const auto [c1, k1] = residuals(12, 24);
  const auto [c2, k2] = residuals(24, 48);
  EXPECT_LT(c2, 1e-6);
  EXPECT_LT(k2, 1e-6);
  EXPECT_LE(c2, c1 / 4 + 1e-12);
  EXPECT_LE(k2, k1 / 4 + 1e-12);
}

TEST(Surfaces, PositiveSectionalCurvatureOnConvexFixtures) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GeometryCache geo = compute_geometry(reconstruct(random_gauss_fixture(R31, GridSpec::sphere(12, 24), seed, 0.05)));
    EXPECT_GT(sectional_curvature(geo).minCoeff(), 0.0);
  }
  EXPECT_GT(sectional_curvature(compute_geometry(reconstruct(perturbed_surface(16, 32)))).minCoeff(), 0.0);
}

TEST(Surfaces, Acausal) {
  EXPECT_GT(min_pair_separation2(paper_gamma_fixture(128)), 0.0);
  EXPECT_GT(min_pair_separation2(reconstruct(perturbed_curve(64))), 0.0);
  EXPECT_GT(min_pair_separation2(reconstruct(perturbed_surface(12, 24))), 0.0);
}

TEST(ProjectedVolume, Disc) {
  EXPECT_NEAR(projected_volume(circle_fixture(R21, 2.0, 64), LorentzMap::identity(R21)), 4 * kPi, 1e-12);
  EXPECT_NEAR(projected_volume(sphere_fixture(R31, 1.0, GridSpec::sphere(16, 32)), LorentzMap::identity(R31)), 4 * kPi / 3, 1e-10);
}

TEST(Fixtures, ModeTermsRoundTrip) {
  const auto t = parse_mode_terms("const:1 cos2:0.01 sin1:0.05 Y3_-1:0.02");
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[3].kind, ModeTerm::Kind::ylm);
  EXPECT_EQ(t[3].m, -1);
  EXPECT_EQ(parse_mode_terms(format_mode_terms(t)).size(), 4u);
  EXPECT_THROW(parse_mode_terms("cos:1"), ArgumentError);
  EXPECT_THROW(parse_mode_terms("Y1_2:1"), ArgumentError);
}
