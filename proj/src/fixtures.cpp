#include "lmcf/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace lmcf {

namespace {

double parse_number(const std::string& s, const std::string& token) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ArgumentError("bad number in mode term '" + token + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& token) {
  size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ArgumentError("bad index in mode term '" + token + "'");
  return v;
}

}  // namespace

std::vector<ModeTerm> parse_mode_terms(const std::string& text) {
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::vector<ModeTerm> out;
  std::string tok;
  while (in >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ArgumentError("mode term '" + tok + "' lacks ':'");
    const std::string head = tok.substr(0, colon);
    ModeTerm t;
    t.amplitude = parse_number(tok.substr(colon + 1), tok);
    if (head == "const") {
      t.kind = ModeTerm::Kind::constant;
    } else if (head.rfind("cos", 0) == 0 || head.rfind("sin", 0) == 0) {
      t.kind = head[0] == 'c' ? ModeTerm::Kind::cos : ModeTerm::Kind::sin;
      t.l = parse_int(head.substr(3), tok);
      if (t.l < 0) throw ArgumentError("negative wavenumber in '" + tok + "'");
    } else if (head.size() > 1 && head[0] == 'Y') {
      const auto us = head.find('_');
      if (us == std::string::npos) throw ArgumentError("mode term '" + tok + "' needs Yl_m");
      t.kind = ModeTerm::Kind::ylm;
      t.l = parse_int(head.substr(1, us - 1), tok);
      t.m = parse_int(head.substr(us + 1), tok);
      if (t.l < 0 || std::abs(t.m) > t.l) throw ArgumentError("invalid degree/order in '" + tok + "'");
    } else {
      throw ArgumentError("unknown mode term '" + tok + "'");
    }
    out.push_back(t);
  }
  return out;
}

std::string format_mode_terms(const std::vector<ModeTerm>& terms) {
  std::string out;
  char buf[64];
  for (const auto& t : terms) {
    if (!out.empty()) out += ' ';
    switch (t.kind) {
      case ModeTerm::Kind::constant: std::snprintf(buf, sizeof buf, "const:%.17g", t.amplitude); break;
      case ModeTerm::Kind::cos: std::snprintf(buf, sizeof buf, "cos%d:%.17g", t.l, t.amplitude); break;
      case ModeTerm::Kind::sin: std::snprintf(buf, sizeof buf, "sin%d:%.17g", t.l, t.amplitude); break;
      case ModeTerm::Kind::ylm:
        std::snprintf(buf, sizeof buf, "Y%d_%d:%.17g", t.l, t.m, t.amplitude);
        break;
    }
    out += buf;
  }
  return out;
}

Vec evaluate_modes(const GridSpec& grid, const std::vector<ModeTerm>& terms) {
  Vec v = Vec::Zero(grid.size());
  for (const auto& t : terms) {
    if (grid.n == 1 && t.kind == ModeTerm::Kind::ylm)
      throw ArgumentError("spherical-harmonic terms need a surface grid");
    if (grid.n == 2 && (t.kind == ModeTerm::Kind::cos || t.kind == ModeTerm::Kind::sin))
      throw ArgumentError("cos/sin terms need a curve grid; use Yl_m on surfaces");
    for (int s = 0; s < grid.size(); ++s) {
      const double th = grid.theta(s);
      switch (t.kind) {
        case ModeTerm::Kind::constant: v(s) += t.amplitude; break;
        case ModeTerm::Kind::cos: v(s) += t.amplitude * std::cos(t.l * th); break;
        case ModeTerm::Kind::sin: v(s) += t.amplitude * std::sin(t.l * th); break;
        case ModeTerm::Kind::ylm:
          v(s) += t.amplitude * real_spherical_harmonic(t.l, t.m, grid.phi(s), th);
          break;
      }
    }
  }
  return v;
}

VertexImmersion circle_fixture(const SignatureSpace& space, double r, int m, const Vec& center) {
  const GridSpec grid = GridSpec::curve(m);
  return sphere_fixture(space, r, grid, center);
}

VertexImmersion sphere_fixture(const SignatureSpace& space, double r, const GridSpec& grid,
                               const Vec& center) {
  grid.validate();
  if (space.n_space != grid.n + 1) throw ArgumentError("signature does not match grid dimension");
  if (!(r > 0.0)) throw ArgumentError("radius must be positive");
  VertexImmersion im{grid, space, Mat::Zero(space.dim(), grid.size())};
  for (int s = 0; s < grid.size(); ++s) im.positions.col(s).head(space.n_space) = r * grid.z(s);
  if (center.size() == space.dim()) im.positions.colwise() += center;
  else if (center.size() != 0) throw ArgumentError("center has the wrong dimension");
  return im;
}

VertexImmersion paper_gamma_fixture(int m) {
  const GridSpec grid = GridSpec::curve(m);
  VertexImmersion im{grid, SignatureSpace(2, 1), Mat(3, m)};
  for (int s = 0; s < m; ++s) {
    const double t = grid.theta(s);
    im.positions.col(s) << 2.0 * std::cos(t), 2.0 * std::sin(t), std::sin(t);
  }
  return im;
}

GaussImmersion gauss_fixture(const SignatureSpace& space, const GridSpec& grid,
                             const std::vector<ModeTerm>& sigma,
                             const std::vector<std::vector<ModeTerm>>& eta) {
  grid.validate();
  if (space.n_space != grid.n + 1) throw ArgumentError("signature does not match grid dimension");
  if (static_cast<int>(eta.size()) > space.n_time)
    throw ArgumentError("more eta fields than timelike dimensions");
  GaussImmersion g{grid, space, LorentzMap::identity(space), evaluate_modes(grid, sigma),
                   Mat::Zero(space.n_time, grid.size())};
  for (size_t a = 0; a < eta.size(); ++a) g.eta.row(a) = evaluate_modes(grid, eta[a]).transpose();
  if (g.sigma.minCoeff() <= 0.0) throw ArgumentError("support function must be positive");
  return g;
}

GaussImmersion random_gauss_fixture(const SignatureSpace& space, const GridSpec& grid,
                                    std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
  std::vector<ModeTerm> sigma{{ModeTerm::Kind::constant, 0, 0, 1.0}};
  std::vector<std::vector<ModeTerm>> eta(space.n_time);
  auto add = [&](std::vector<ModeTerm>& terms, int lmin, int lmax) {
    for (int l = lmin; l <= lmax; ++l) {
      if (grid.n == 1) {
        terms.push_back({ModeTerm::Kind::cos, l, 0, amplitude * uniform() / l});
        terms.push_back({ModeTerm::Kind::sin, l, 0, amplitude * uniform() / l});
      } else {
        for (int m = -l; m <= l; ++m) terms.push_back({ModeTerm::Kind::ylm, l, m, amplitude * uniform() / l});
      }
    }
  };
  add(sigma, 2, 4);
  for (auto& e : eta) add(e, 1, 3);
  return gauss_fixture(space, grid, sigma, eta);
}

}  // namespace lmcf
