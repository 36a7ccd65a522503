#include "lmcf/diagnostics.hpp"
#include "lmcf/fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lmcf;

namespace {

const SignatureSpace R21(2, 1);
const SignatureSpace R31(3, 1);

// Frozen from the brute-force oracles (dense direction sweep with bisection on a; exhaustive pairs).
constexpr double kY20Alpha = 0.47726913794003956;
constexpr double kY20Beta = 0.52273086205996067;
constexpr double kY20DeltaMinus = 0.4543780254263376;
constexpr double kGammaDeltaMinus = 0.75;
constexpr double kGammaDeltaPlus = 4.0 / 3.0;
constexpr double kGammaMargin = 0.1875;

VertexImmersion y20_surface() {
  return reconstruct(gauss_fixture(R31, GridSpec::sphere(16, 32), parse_mode_terms("const:1 Y2_0:0.05"), {}));
}

VertexImmersion wobbly_curve(int m) {
  return reconstruct(gauss_fixture(R21, GridSpec::curve(m), parse_mode_terms("const:1 cos2:0.08 sin3:0.03"),
                                   {parse_mode_terms("sin1:0.2 cos2:0.05")}));
}

VertexImmersion boosted_circle(int m, double phi) {
  Vec c = Vec::Zero(2);
  c(0) = 1.0;
  return apply_lorentz(circle_fixture(R21, 1.0, m), boost_exp(R21, c, phi), 1.0, Vec::Zero(3));
}

}  // namespace

TEST(ConvexityMargin, Circle) {
  for (double r : {0.5, 2.0}) EXPECT_NEAR(convexity_margin(compute_geometry(circle_fixture(R21, r, 64))), 1 / (r * r), 1e-12);
}

TEST(ConvexityMargin, GammaAgainstFiniteDifferenceSweep) {
  double fd_min = 1e300;
  const int m = 1 << 14;
  for (int j = 0; j < m; ++j) {
    const Vec k = oracle::gamma_fd_curvature_vector(2 * std::numbers::pi * j / m);
    fd_min = std::min(fd_min, oracle::form(2, k, k));
  }
  EXPECT_NEAR(fd_min, kGammaMargin, 1e-7);
  EXPECT_NEAR(convexity_margin(compute_geometry(paper_gamma_fixture(256))), kGammaMargin, 1e-9);
}

TEST(Pinching, RoundAndCurves) {
  const Pinching s = pinching_ratios(compute_geometry(sphere_fixture(R31, 1.7, GridSpec::sphere(12, 24))));
  EXPECT_NEAR(s.alpha, 0.5, 1e-8);
  EXPECT_NEAR(s.beta, 0.5, 1e-8);
  for (const VertexImmersion& c : {paper_gamma_fixture(128), wobbly_curve(128)}) {
    const Pinching p = pinching_ratios(compute_geometry(c));
    EXPECT_NEAR(p.alpha, 1.0, 1e-10);
    EXPECT_NEAR(p.beta, 1.0, 1e-10);
  }
}

TEST(Pinching, PerturbedSphereMatchesBruteForce) {
  const GeometryCache geo = compute_geometry(y20_surface());
  const Pinching p = pinching_ratios(geo);
  const oracle::BrutePinching b = oracle::brute_pinching(geo, 512);
  EXPECT_NEAR(p.alpha, b.alpha, 1e-9);
  EXPECT_NEAR(p.beta, b.beta, 1e-9);
  EXPECT_NEAR(p.alpha, kY20Alpha, 1e-9);
  EXPECT_NEAR(p.beta, kY20Beta, 1e-9);
  EXPECT_LT(p.alpha, 0.5);
  EXPECT_GT(p.beta, 0.5);
}

TEST(Pinching, NonConvexInputRejected) {
  // Spacelike tangents but a timelike curvature vector near theta = pi / 4.
  const GridSpec g = GridSpec::curve(64);
  Mat P(3, 64);
  for (int s = 0; s < 64; ++s) {
    const double t = g.theta(s);
    P.col(s) << std::cos(t), std::sin(t), 0.4 * std::sin(2 * t);
  }
  const GeometryCache geo = compute_geometry(VertexImmersion{g, R21, P});
  EXPECT_LT(convexity_margin(geo), 0.0);
  EXPECT_THROW(pinching_ratios(geo), PreconditionError);
}

TEST(NullNormalFan, NormalizationAndNullity) {
  for (const VertexImmersion& im : {paper_gamma_fixture(64), y20_surface()}) {
    const GeometryCache geo = compute_geometry(im);
    const NullNormalFan fan = null_normal_fan(geo);
    for (int s = 0; s < geo.samples(); s += 7) {
      const auto ns = fan.normals(s);
      EXPECT_EQ(ns.size(), 2u);
      for (const Vec& N : ns) {
        EXPECT_NEAR(inner(im.space, N, geo.H.col(s)), 1.0, 1e-10);
        EXPECT_NEAR(inner(im.space, N, N), 0.0, 1e-10 * (1 + N.squaredNorm()));
        for (const Mat& d : geo.dF) EXPECT_NEAR(inner(im.space, N, d.col(s)), 0.0, 1e-9);
      }
    }
  }
}

TEST(Noncollapsing, UnitCircleIsExactlyOne) {
  const VertexImmersion im = circle_fixture(R21, 1.0, 128);
  const GeometryCache geo = compute_geometry(im);
  const NoncollapsingResult r = noncollapsing_deltas(im, geo, null_normal_fan(geo));
  EXPECT_NEAR(r.delta_minus, 1.0, 1e-10);
  EXPECT_NEAR(r.delta_plus, 1.0, 1e-10);
  EXPECT_NEAR(r.diameter2, 4.0, 1e-12);
}

TEST(Noncollapsing, BruteForceAgreementOnThreeFixtures) {
  for (const VertexImmersion& im : {paper_gamma_fixture(256), wobbly_curve(256), boosted_circle(128, 0.6), y20_surface()}) {
    const GeometryCache geo = compute_geometry(im);
    const NoncollapsingResult r = noncollapsing_deltas(im, geo, null_normal_fan(geo));
    const oracle::BruteDeltas b = oracle::brute_deltas(im, geo, 256);
    EXPECT_NEAR(r.delta_minus, b.delta_minus, 1e-9);
    EXPECT_NEAR(r.delta_plus, b.delta_plus, 1e-9);
    const double inv_n = 1.0 / im.grid.n;
    EXPECT_LE(r.delta_minus, inv_n + 1e-9);
    EXPECT_GE(r.delta_plus, inv_n - 1e-9);
  }
}

TEST(Noncollapsing, GammaPinnedValues) {
  const VertexImmersion im = paper_gamma_fixture(4096);
  const GeometryCache geo = compute_geometry(im);
  const NoncollapsingResult r = noncollapsing_deltas(im, geo, null_normal_fan(geo));
  EXPECT_NEAR(r.delta_minus, kGammaDeltaMinus, 1e-8);
  EXPECT_NEAR(r.delta_plus, kGammaDeltaPlus, 1e-8);
  const NoncollapsingResult y = noncollapsing_deltas(y20_surface(), compute_geometry(y20_surface()),
                                                     null_normal_fan(compute_geometry(y20_surface())));
  EXPECT_NEAR(y.delta_minus, kY20DeltaMinus, 1e-9);
}

TEST(Noncollapsing, TwoTimelikeDirectionsBracketSampledFan) {
  const SignatureSpace R22(2, 2);
  const VertexImmersion im = reconstruct(gauss_fixture(R22, GridSpec::curve(64), parse_mode_terms("const:1 cos2:0.05"),
                                                       {parse_mode_terms("sin1:0.2"), parse_mode_terms("cos1:0.15 sin2:0.05")}));
  const GeometryCache geo = compute_geometry(im);
  const NullNormalFan fan = null_normal_fan(geo, 720);
  const NoncollapsingResult r = noncollapsing_deltas(im, geo, fan);
  double lo = 1e300, hi = -1e300;
  for (int x = 0; x < im.samples(); ++x)
    for (const Vec& N : fan.normals(x)) {
      for (int y = 0; y < im.samples(); ++y) {
        if (y == x) continue;
        const Vec w = im.positions.col(y) - im.positions.col(x);
        const double z = 2.0 * oracle::form(2, w, N) / oracle::form(2, w, w);
        lo = std::min(lo, z), hi = std::max(hi, z);
      }
      const double d = oracle::form(2, geo.h[0].col(x) / geo.g[0](x), N);
      lo = std::min(lo, d), hi = std::max(hi, d);
    }
  EXPECT_LE(r.delta_minus, lo + 1e-12);
  EXPECT_GE(r.delta_plus, hi - 1e-12);
  EXPECT_NEAR(r.delta_minus, lo, 1e-4);
  EXPECT_NEAR(r.delta_plus, hi, 1e-4);
}

TEST(Noncollapsing, CausalPairRaises) {
  // Spacelike tangents everywhere (|eta'| < 1 on a unit circle), but eta climbs by more than the
  // chord between opposite points.
  const int m = 128;
  const GridSpec g = GridSpec::curve(m);
  Mat P(3, m);
  for (int s = 0; s < m; ++s) {
    const double t = g.theta(s);
    double eta = 0.0;
    const int q = 400;
    for (int i = 0; i < q; ++i) {
      const double u = t * (i + 0.5) / q;
      eta += 0.95 * std::tanh(3.0 * std::cos(u)) * t / q;
    }
    P.col(s) << std::cos(t), std::sin(t), eta;
  }
  const VertexImmersion im{g, R21, P};
  EXPECT_LT(min_pair_separation2(im), 0.0);
  // This curve also loses spacelike mean curvature, which is reported first.
  const GeometryCache geo = compute_geometry(im);
  EXPECT_THROW(noncollapsing_deltas(im, geo, null_normal_fan(geo)), PreconditionError);

  // Causal pair on otherwise valid geometry: lift one sample of the circle in time so it is
  // timelike-separated from its antipode, keeping the circle's cache for the local data.
  const VertexImmersion c = circle_fixture(R21, 1.0, m);
  const GeometryCache cg = compute_geometry(c);
  VertexImmersion lifted = c;
  lifted.positions(2, 0) = 3.0;
  try {
    noncollapsing_deltas(lifted, cg, null_normal_fan(cg));
    FAIL() << "expected an acausality error";
  } catch (const AcausalityError& e) {
    EXPECT_TRUE(e.x == 0 || e.y == 0);
    EXPECT_LE(e.d2, 0.0);
  }
}

TEST(BoundChecks, UnitCircleIsTight) {
  const VertexImmersion im = circle_fixture(R21, 1.0, 128);
  const DiagnosticsRecord rec = diagnose(im, compute_geometry(im), 0.0);
  for (const BoundCheck& b : bound_checks(rec, 1)) {
    EXPECT_TRUE(b.holds) << b.name;
    if (b.name == "diameter" || b.name == "curvature_comparison") {
      EXPECT_NEAR(b.lhs, b.rhs, 1e-6) << b.name;
    }
  }
}

TEST(BoundChecks, HoldWithSlackOnGammaAndSurfaces) {
  for (const VertexImmersion& im : {paper_gamma_fixture(256), wobbly_curve(128), boosted_circle(128, 0.6), y20_surface()}) {
    const DiagnosticsRecord rec = diagnose(im, compute_geometry(im), 0.0);
    for (const BoundCheck& b : bound_checks(rec, im.grid.n)) EXPECT_TRUE(b.holds) << b.name;
  }
  const VertexImmersion g = paper_gamma_fixture(256);
  const DiagnosticsRecord rec = diagnose(g, compute_geometry(g), 0.0);
  for (const BoundCheck& b : bound_checks(rec, 1))
    if (b.name == "diameter" || b.name == "curvature_comparison") {
      EXPECT_GT(b.slack, 0.0) << b.name;
    }
}

TEST(Tilt, ZeroForSlicesAndMatchesSweep) {
  const VertexImmersion c = reconstruct(gauss_fixture(R21, GridSpec::curve(64), parse_mode_terms("const:1 cos2:0.1"), {}));
  const GeometryCache gc = compute_geometry(c);
  for (int x = 0; x < 64; x += 9) EXPECT_LT(tilt_bound(c, gc, x), 1e-12);

  for (const VertexImmersion& im : {paper_gamma_fixture(256), boosted_circle(128, 0.6), wobbly_curve(128)}) {
    const GeometryCache geo = compute_geometry(im);
    double uniform = 0.0;
    for (int x = 0; x < im.samples(); x += 5) {
      const Vec e = oracle::timelike_normal(geo, x);
      double ref = 0.0;
      for (int y = 0; y < im.samples(); ++y) ref = std::max(ref, std::abs(oracle::form(2, geo.H.col(y), e)));
      const double t = tilt_bound(im, geo, x);
      EXPECT_NEAR(t, ref, 1e-10 * (1 + ref));
      uniform = std::max(uniform, t);
    }
    EXPECT_TRUE(std::isfinite(uniform));
  }
  const VertexImmersion g = paper_gamma_fixture(256);
  EXPECT_NEAR(tilt_bound(g, compute_geometry(g), 0), 0.0, 1e-10);
}

TEST(Diagnose, RecordColumnsAndRoundSphere) {
  EXPECT_EQ(diagnostics_columns().size(), diagnostics_values(DiagnosticsRecord{}).size());
  const VertexImmersion im = sphere_fixture(R31, 1.0, GridSpec::sphere(12, 24));
  const DiagnosticsRecord r = diagnose(im, compute_geometry(im), 0.25);
  EXPECT_EQ(r.time, 0.25);
  EXPECT_NEAR(r.alpha, 0.5, 1e-8);
  EXPECT_NEAR(r.beta, 0.5, 1e-8);
  EXPECT_NEAR(r.delta_minus, 0.5, 1e-6);
  EXPECT_NEAR(r.delta_plus, 0.5, 1e-6);
  EXPECT_NEAR(r.convex_margin, 1.0, 1e-8);
  EXPECT_GT(r.acausal_margin, 0.0);
}
