#include "lmcf/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lmcf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(GridSpec, MinimaEnforced) {
  EXPECT_THROW(GridSpec::curve(14).validate(), ArgumentError);
  EXPECT_THROW(GridSpec::curve(17).validate(), ArgumentError);
  EXPECT_NO_THROW(GridSpec::curve(16).validate());
  EXPECT_THROW(GridSpec::sphere(8, 16).validate(), ArgumentError);
  EXPECT_THROW(GridSpec::sphere(9, 15).validate(), ArgumentError);
  EXPECT_NO_THROW(GridSpec::sphere(9, 16).validate());
}

TEST(GridSpec, NodesAndRoundPoints) {
  const GridSpec c = GridSpec::curve(32);
  EXPECT_DOUBLE_EQ(c.theta(8), kPi / 2);
  const GridSpec s = GridSpec::sphere(10, 20);
  EXPECT_DOUBLE_EQ(s.phi(0), 0.05 * kPi);
  EXPECT_EQ(s.size(), 200);
  for (int i = 0; i < s.size(); ++i) EXPECT_NEAR(s.z(i).norm(), 1.0, 1e-15);
}

TEST(Quadrature, RoundAreaAndMoments) {
  EXPECT_NEAR(GridSpec::curve(64).round_weights().sum(), 2 * kPi, 1e-13);
  const GridSpec s = GridSpec::sphere(16, 32);
  const Vec w = s.round_weights();
  EXPECT_NEAR(w.sum(), 4 * kPi, 1e-12);
  double z2 = 0.0;
  for (int i = 0; i < s.size(); ++i) z2 += w(i) * std::pow(s.z(i)(2), 2);
  EXPECT_NEAR(z2, 4 * kPi / 3, 1e-12);
}

TEST(SphericalHarmonics, OrthonormalOnGrid) {
  const GridSpec s = GridSpec::sphere(16, 32);
  const Vec w = s.round_weights();
  const std::vector<std::pair<int, int>> lm{{0, 0}, {1, -1}, {1, 0}, {2, 1}, {3, -2}, {5, 4}};
  for (auto [l1, m1] : lm)
    for (auto [l2, m2] : lm) {
      double ip = 0.0;
      for (int i = 0; i < s.size(); ++i)
        ip += w(i) * real_spherical_harmonic(l1, m1, s.phi(i), s.theta(i)) *
              real_spherical_harmonic(l2, m2, s.phi(i), s.theta(i));
      EXPECT_NEAR(ip, (l1 == l2 && m1 == m2) ? 1.0 : 0.0, 1e-12);
    }
}

TEST(Differentiator, SpectralCurveIsExact) {
  const GridSpec g = GridSpec::curve(32);
  Mat X(1, 32);
  for (int s = 0; s < 32; ++s) X(0, s) = std::sin(3 * g.theta(s)) + 0.5 * std::cos(g.theta(s));
  const Differentiator D(g);
  const Mat d1 = D.d(X, 0), d2 = D.dd(X, 0);
  for (int s = 0; s < 32; ++s) {
    const double t = g.theta(s);
    EXPECT_NEAR(d1(0, s), 3 * std::cos(3 * t) - 0.5 * std::sin(t), 1e-12);
    EXPECT_NEAR(d2(0, s), -9 * std::sin(3 * t) - 0.5 * std::cos(t), 1e-11);
  }
}

TEST(Differentiator, Fd4ConvergesAtFourthOrder) {
  auto err = [](int m) {
    const GridSpec g = GridSpec::curve(m, DerivativeScheme::fd4);
    Mat X(1, m);
    for (int s = 0; s < m; ++s) X(0, s) = std::exp(std::sin(g.theta(s)));
    const Mat d = Differentiator(g).d(X, 0);
    double e = 0.0;
    for (int s = 0; s < m; ++s)
      e = std::max(e, std::abs(d(0, s) - std::cos(g.theta(s)) * std::exp(std::sin(g.theta(s)))));
    return e;
  };
  EXPECT_NEAR(std::log2(err(64) / err(128)), 4.0, 0.2);
}

TEST(Differentiator, SphereCoordinatesOfEmbedding) {
  const GridSpec g = GridSpec::sphere(16, 32);
  Mat X(3, g.size());
  for (int s = 0; s < g.size(); ++s) X.col(s) = g.z(s);
  const Differentiator D(g);
  const Mat dphi = D.d(X, 0), dth = D.d(X, 1), dpt = D.dmixed(X);
  for (int s = 0; s < g.size(); ++s) {
    const double p = g.phi(s), t = g.theta(s);
    Vec ep(3), et(3), ept(3);
    ep << std::cos(p) * std::cos(t), std::cos(p) * std::sin(t), -std::sin(p);
    et << -std::sin(p) * std::sin(t), std::sin(p) * std::cos(t), 0.0;
    ept << -std::cos(p) * std::sin(t), std::cos(p) * std::cos(t), 0.0;
    EXPECT_LT((dphi.col(s) - ep).norm(), 1e-11);
    EXPECT_LT((dth.col(s) - et).norm(), 1e-11);
    EXPECT_LT((dpt.col(s) - ept).norm(), 1e-10);
  }
}

TEST(FourierInterpolant, ReproducesBandLimitedCurve) {
  const GridSpec g = GridSpec::curve(16);
  Mat X(1, 16);
  for (int s = 0; s < 16; ++s) X(0, s) = std::cos(2 * g.theta(s)) + std::sin(5 * g.theta(s));
  const FourierInterpolant fi(g, X);
  for (double t : {0.1, 1.3, 4.0}) {
    const auto e = fi.eval(t);
    EXPECT_NEAR(e[0](0), std::cos(2 * t) + std::sin(5 * t), 1e-13);
    EXPECT_NEAR(e[1](0), -2 * std::sin(2 * t) + 5 * std::cos(5 * t), 1e-12);
  }
  const Mat fine = resample(g, X, GridSpec::curve(64));
  const GridSpec f = GridSpec::curve(64);
  for (int s = 0; s < 64; ++s) EXPECT_NEAR(fine(0, s), std::cos(2 * f.theta(s)) + std::sin(5 * f.theta(s)), 1e-13);
}

TEST(SpectralFilter, KeepsLowModesAndRemovesNyquist) {
  const GridSpec g = GridSpec::curve(64);
  Mat X(1, 64), Y(1, 64);
  for (int s = 0; s < 64; ++s) {
    X(0, s) = std::cos(3 * g.theta(s));
    Y(0, s) = X(0, s) + (s % 2 ? -1.0 : 1.0);
  }
  spectral_filter(g, Y);
  EXPECT_LT((Y - X).cwiseAbs().maxCoeff(), 1e-14);
}
