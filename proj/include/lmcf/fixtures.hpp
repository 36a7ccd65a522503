#pragma once

#include "lmcf/immersion.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lmcf {

// One term of a support-function expansion: constant, cos(l theta), sin(l theta) for curves,
// or the real spherical harmonic Y_{l,m} for surfaces.
struct ModeTerm {
  enum class Kind { constant, cos, sin, ylm };
  Kind kind = Kind::constant;
  int l = 0;
  int m = 0;
  double amplitude = 0.0;
};

// Parses "const:1 cos2:0.01 sin1:0.05 Y2_0:0.05 Y3_-1:0.02".
std::vector<ModeTerm> parse_mode_terms(const std::string& text);
std::string format_mode_terms(const std::vector<ModeTerm>& terms);
Vec evaluate_modes(const GridSpec& grid, const std::vector<ModeTerm>& terms);

VertexImmersion circle_fixture(const SignatureSpace& space, double r, int m, const Vec& center = Vec());
VertexImmersion sphere_fixture(const SignatureSpace& space, double r, const GridSpec& grid,
                               const Vec& center = Vec());
// gamma(theta) = (2 cos theta, 2 sin theta, sin theta) in R^{2,1}.
VertexImmersion paper_gamma_fixture(int m);

GaussImmersion gauss_fixture(const SignatureSpace& space, const GridSpec& grid,
                             const std::vector<ModeTerm>& sigma,
                             const std::vector<std::vector<ModeTerm>>& eta);

// Small random low-degree perturbation of the unit sphere (degrees 2..4), reproducible by seed.
GaussImmersion random_gauss_fixture(const SignatureSpace& space, const GridSpec& grid,
                                    std::uint64_t seed, double amplitude);

}  // namespace lmcf
