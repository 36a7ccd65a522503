#include "lmcf/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lmcf {

namespace {

constexpr double kPi = std::numbers::pi;

double ip(int ns, const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < ns; ++i) s += a[i] * b[i];
  for (int i = ns; i < dim; ++i) s -= a[i] * b[i];
  return s;
}

double ip_col(const SignatureSpace& sp, const Mat& A, const Mat& B, int s) {
  return ip(sp.n_space, A.col(s).data(), B.col(s).data(), sp.dim());
}

void check_shapes(const GridSpec& grid, const SignatureSpace& sp, const Mat& F) {
  grid.validate();
  if (sp.n_space != grid.n + 1)
    throw ArgumentError("signature needs n + 1 spacelike dimensions for an n-dimensional grid");
  if (F.rows() != sp.dim() || F.cols() != grid.size())
    throw ArgumentError("position array does not match grid and signature");
}

}  // namespace

DegenerateMetricError::DegenerateMetricError(int sample_, double min_eig)
    : std::runtime_error("induced metric is not positive definite at sample " +
                         std::to_string(sample_) + " (min eigenvalue " +
                         std::to_string(min_eig) + ")"),
      sample(sample_),
      min_eigenvalue(min_eig) {}

Mat GeometryCache::metric(int s) const {
  const int n = grid.n;
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = g[sym_index(i, j)](s);
  return G;
}

Mat GeometryCache::inverse_metric(int s) const {
  const int n = grid.n;
  Mat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = ginv[sym_index(i, j)](s);
  return G;
}

Vec GeometryCache::h_vv(int s, const Vec& v) const {
  Vec out = Vec::Zero(space.dim());
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) out += v(i) * v(j) * h[sym_index(i, j)].col(s);
  return out;
}

Vec GeometryCache::normal_part(int s, const Vec& w) const {
  Vec out = w;
  for (int a = 0; a < grid.n; ++a)
    for (int b = 0; b < grid.n; ++b) {
      const Vec db = dF[b].col(s);
      out -= ginv[sym_index(a, b)](s) * inner(space, w, db) * dF[a].col(s);
    }
  return out;
}

Mat GeometryCache::orthonormal_tangent_coords(int s) const {
  if (grid.n == 1) return Mat::Constant(1, 1, 1.0 / std::sqrt(g[0](s)));
  const double g00 = g[0](s), g01 = g[1](s), g11 = g[2](s);
  const double det = g00 * g11 - g01 * g01;
  Mat E = Mat::Zero(2, 2);
  E(0, 0) = 1.0 / std::sqrt(g00);
  const double c = std::sqrt(g00 / det);
  E(0, 1) = -g01 / g00 * c;
  E(1, 1) = c;
  return E;
}

GeometryCache assemble_geometry(const GridSpec& grid, const SignatureSpace& space, Mat F,
                                std::vector<Mat> dF, std::vector<Mat> ddF,
                                const std::vector<Vec>* metric) {
  check_shapes(grid, space, F);
  const int n = grid.n, S = grid.size(), dim = space.dim(), ns = space.n_space;
  const int nsym = sym_count(n);
  GeometryCache geo;
  geo.grid = grid;
  geo.space = space;
  geo.F = std::move(F);
  geo.dF = std::move(dF);
  geo.ddF = std::move(ddF);
  geo.g.assign(nsym, Vec(S));
  geo.ginv.assign(nsym, Vec(S));
  geo.christoffel.assign(n * nsym, Vec(S));
  geo.h.assign(nsym, Mat(dim, S));
  geo.H = Mat::Zero(dim, S);
  geo.H2 = Vec(S);
  geo.dmu = Vec(S);
  const Vec w = grid.coordinate_weights();

  for (int s = 0; s < S; ++s) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        geo.g[sym_index(i, j)](s) =
            metric ? (*metric)[sym_index(i, j)](s) : ip_col(space, geo.dF[i], geo.dF[j], s);
    double det, min_eig, scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, geo.dF[i].col(s).squaredNorm());
    if (n == 1) {
      det = min_eig = geo.g[0](s);
      geo.ginv[0](s) = 1.0 / det;
    } else {
      const double a = geo.g[0](s), b = geo.g[1](s), c = geo.g[2](s);
      det = a * c - b * b;
      min_eig = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
      geo.ginv[0](s) = c / det;
      geo.ginv[1](s) = -b / det;
      geo.ginv[2](s) = a / det;
    }
    if (!(min_eig > 1e-12 * scale)) throw DegenerateMetricError(s, min_eig);

    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const int ij = sym_index(i, j);
        double proj[2];
        for (int l = 0; l < n; ++l) proj[l] = ip_col(space, geo.ddF[ij], geo.dF[l], s);
        auto hc = geo.h[ij].col(s);
        hc = geo.ddF[ij].col(s);
        for (int k = 0; k < n; ++k) {
          double gam = 0.0;
          for (int l = 0; l < n; ++l) gam += geo.ginv[sym_index(k, l)](s) * proj[l];
          geo.christoffel[k * nsym + ij](s) = gam;
          hc -= gam * geo.dF[k].col(s);
        }
      }
    auto Hc = geo.H.col(s);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) Hc += geo.ginv[sym_index(i, j)](s) * geo.h[sym_index(i, j)].col(s);
    geo.H2(s) = ip(ns, Hc.data(), Hc.data(), dim);
    geo.dmu(s) = std::sqrt(det) * w(s);
  }
  geo.area = geo.dmu.sum();
  geo.H2_min = geo.H2.minCoeff();
  geo.H2_max = geo.H2.maxCoeff();
  return geo;
}

GeometryCache compute_geometry(const VertexImmersion& im) {
  check_shapes(im.grid, im.space, im.positions);
  const Differentiator D(im.grid);
  const Mat& F = im.positions;
  if (im.grid.n == 1) return assemble_geometry(im.grid, im.space, F, {D.d(F, 0)}, {D.dd(F, 0)});
  return assemble_geometry(im.grid, im.space, F, {D.d(F, 0), D.d(F, 1)},
                           {D.dd(F, 0), D.dmixed(F), D.dd(F, 1)});
}

namespace {

// Round-sphere frame fields at sample s: z, dz/dphi, dz/dtheta (n = 2) or z, dz/dtheta (n = 1).
void sphere_frame(const GridSpec& grid, int s, Vec& z, Vec& z0, Vec& z1) {
  const double t = grid.theta(s);
  if (grid.n == 1) {
    z.resize(2);
    z0.resize(2);
    z << std::cos(t), std::sin(t);
    z0 << -std::sin(t), std::cos(t);
    return;
  }
  const double p = grid.phi(s);
  z.resize(3);
  z0.resize(3);
  z1.resize(3);
  z << std::sin(p) * std::cos(t), std::sin(p) * std::sin(t), std::cos(p);
  z0 << std::cos(p) * std::cos(t), std::cos(p) * std::sin(t), -std::sin(p);
  z1 << -std::sin(p) * std::sin(t), std::sin(p) * std::cos(t), 0.0;
}

void check_gauss(const GaussImmersion& gim) {
  gim.grid.validate();
  if (gim.space.n_space != gim.grid.n + 1)
    throw ArgumentError("signature needs n + 1 spacelike dimensions for an n-dimensional grid");
  if (gim.sigma.size() != gim.grid.size() || gim.eta.rows() != gim.space.n_time ||
      gim.eta.cols() != gim.grid.size())
    throw ArgumentError("support data does not match grid and signature");
  if (gim.plane.matrix.rows() != gim.space.dim() || gim.plane.matrix.cols() != gim.space.dim())
    throw ArgumentError("plane map has the wrong dimension");
}

Mat reference_positions(const GaussImmersion& gim, const Differentiator& D) {
  const GridSpec& grid = gim.grid;
  const int S = grid.size(), ns = gim.space.n_space, k = gim.space.n_time;
  Mat sig = gim.sigma.transpose();
  Mat F(gim.space.dim(), S);
  const Mat s0 = D.d(sig, 0);
  const Mat s1 = grid.n == 2 ? D.d(sig, 1) : Mat();
  Vec z, z0, z1;
  for (int s = 0; s < S; ++s) {
    sphere_frame(grid, s, z, z0, z1);
    Vec p = gim.sigma(s) * z + s0(0, s) * z0;
    if (grid.n == 2) {
      const double sp = std::sin(grid.phi(s));
      p += s1(0, s) / (sp * sp) * z1;
    }
    F.col(s).head(ns) = p;
    F.col(s).tail(k) = gim.eta.col(s);
  }
  return F;
}

}  // namespace

VertexImmersion reconstruct(const GaussImmersion& gim, bool check) {
  check_gauss(gim);
  const Differentiator D(gim.grid);
  VertexImmersion im{gim.grid, gim.space, gim.plane.matrix * reference_positions(gim, D)};
  if (check) {
    try {
      compute_geometry(im);
    } catch (const DegenerateMetricError& e) {
      throw ReconstructionError(std::string("reconstructed immersion is not spacelike: ") +
                                e.what());
    }
  }
  return im;
}

GeometryCache gauss_geometry(const GaussImmersion& gim) {
  check_gauss(gim);
  const GridSpec& grid = gim.grid;
  const Differentiator D(grid);
  const int S = grid.size(), ns = gim.space.n_space, k = gim.space.n_time;
  const Mat& B = gim.plane.matrix;
  const Mat sig = gim.sigma.transpose();
  Mat F = reference_positions(gim, D);
  Vec z, z0, z1;

  if (grid.n == 1) {
    const Mat A = D.dd(sig, 0) + sig;
    const Mat Ap = D.d(A, 0);
    const Mat e1 = D.d(gim.eta, 0), e2 = D.dd(gim.eta, 0);
    Mat X(gim.space.dim(), S), Xt(gim.space.dim(), S);
    std::vector<Vec> metric{Vec(S)};
    for (int s = 0; s < S; ++s) {
      sphere_frame(grid, s, z, z0, z1);
      X.col(s).head(ns) = A(0, s) * z0;
      X.col(s).tail(k) = e1.col(s);
      Xt.col(s).head(ns) = Ap(0, s) * z0 - A(0, s) * z;
      Xt.col(s).tail(k) = e2.col(s);
      metric[0](s) = A(0, s) * A(0, s) - e1.col(s).squaredNorm();
    }
    return assemble_geometry(grid, gim.space, B * F, {B * X}, {B * Xt}, &metric);
  }

  const Mat sp_ = D.d(sig, 0), st = D.d(sig, 1);
  const Mat spp = D.dd(sig, 0), spt = D.dmixed(sig), stt = D.dd(sig, 1);
  const Mat ep = D.d(gim.eta, 0), et = D.d(gim.eta, 1);
  Mat Xp(gim.space.dim(), S), Xq(gim.space.dim(), S);
  std::vector<Vec> metric(3, Vec(S));
  for (int s = 0; s < S; ++s) {
    sphere_frame(grid, s, z, z0, z1);
    const double p = grid.phi(s), sn = std::sin(p), cs = std::cos(p), s2 = sn * sn;
    const double a00 = spp(0, s) + sig(0, s);
    const double a01 = spt(0, s) - cs / sn * st(0, s);
    const double a11 = stt(0, s) + sn * cs * sp_(0, s) + s2 * sig(0, s);
    Xp.col(s).head(ns) = a00 * z0 + a01 / s2 * z1;
    Xp.col(s).tail(k) = ep.col(s);
    Xq.col(s).head(ns) = a01 * z0 + a11 / s2 * z1;
    Xq.col(s).tail(k) = et.col(s);
    metric[0](s) = a00 * a00 + a01 * a01 / s2 - ep.col(s).squaredNorm();
    metric[1](s) = a00 * a01 + a01 * a11 / s2 - ep.col(s).dot(et.col(s));
    metric[2](s) = a01 * a01 + a11 * a11 / s2 - et.col(s).squaredNorm();
  }
  const Mat Xpp = D.d(Xp, 0, -1);
  const Mat Xpq = 0.5 * (D.d(Xp, 1, -1) + D.d(Xq, 0, 1));
  const Mat Xqq = D.d(Xq, 1, 1);
  return assemble_geometry(grid, gim.space, B * F, {B * Xp, B * Xq}, {B * Xpp, B * Xpq, B * Xqq},
                           &metric);
}

GaussImmersion to_gauss(const VertexImmersion& im, const LorentzMap& plane) {
  check_shapes(im.grid, im.space, im.positions);
  const GridSpec& grid = im.grid;
  const int S = grid.size(), ns = im.space.n_space, k = im.space.n_time;
  const Mat Fr = inverse(im.space, plane).matrix * im.positions;
  const FourierInterpolant fi(grid, Fr);
  GaussImmersion out{grid, im.space, plane, Vec(S), Mat(k, S)};
  Vec z, z0, z1;
  std::vector<double> u_star(S);

  for (int s = 0; s < S; ++s) {
    sphere_frame(grid, s, z, z0, z1);
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int q = 0; q < S; ++q) {
      const double v = z.dot(Fr.col(q).head(ns));
      if (v > best_val) {
        best_val = v;
        best = q;
      }
    }
    auto f = [&](double u0, double u1) { return z.dot(fi.value(u0, u1).head(ns)); };
    Vec at;
    if (grid.n == 1) {
      const double h = 2.0 * kPi / grid.m;
      double a = grid.theta(best) - h, b = grid.theta(best) + h;
      const double r = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = b - r * (b - a), d = a + r * (b - a);
      double fc = f(c, 0), fd = f(d, 0);
      for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
        if (fc > fd) {
          b = d, d = c, fd = fc;
          c = b - r * (b - a);
          fc = f(c, 0);
        } else {
          a = c, c = d, fc = fd;
          d = a + r * (b - a);
          fd = f(d, 0);
        }
      }
      double u = 0.5 * (a + b);
      for (int it = 0; it < 3; ++it) {
        const auto e = fi.eval(u);
        const double d1 = z.dot(e[1].head(ns)), d2 = z.dot(e[3].head(ns));
        if (!(d2 < 0.0)) break;
        const double step = -d1 / d2;
        if (std::abs(step) > h) break;
        u += step;
      }
      u_star[s] = u;
      at = fi.value(u);
    } else {
      double u0 = grid.phi(best), u1 = grid.theta(best);
      double fv = f(u0, u1);
      bool concave = false;
      for (int it = 0; it < 60; ++it) {
        const auto e = fi.eval(u0, u1);
        Eigen::Vector2d gr(z.dot(e[1].head(ns)), z.dot(e[2].head(ns)));
        Eigen::Matrix2d Hs;
        Hs << z.dot(e[3].head(ns)), z.dot(e[4].head(ns)), z.dot(e[4].head(ns)),
            z.dot(e[5].head(ns));
        concave = Hs(0, 0) < 0.0 && Hs.determinant() > 0.0;
        Eigen::Vector2d step = concave ? Eigen::Vector2d(-Hs.ldlt().solve(gr)) : Eigen::Vector2d(gr * 0.1);
        double lam = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
          const double fn = f(u0 + lam * step(0), u1 + lam * step(1));
          if (fn >= fv) {
            u0 += lam * step(0);
            u1 += lam * step(1);
            moved = fn > fv;
            fv = fn;
            break;
          }
          lam *= 0.5;
        }
        if (!moved || lam * step.norm() < 1e-14) break;
      }
      if (!concave)
        throw ConversionError("Gauss map is not invertible at grid resolution near sample " +
                              std::to_string(s) + "; refine the grid");
      at = fi.value(u0, u1);
    }
    out.sigma(s) = z.dot(at.head(ns));
    out.eta.col(s) = at.tail(k);
  }

  if (grid.n == 1) {
    double winding = 0.0;
    for (int s = 0; s < S; ++s) {
      double d = u_star[(s + 1) % S] - u_star[s];
      d = std::remainder(d, 2.0 * kPi);
      if (!(d > 0.0))
        throw ConversionError("Gauss map is not injective at grid resolution near sample " +
                              std::to_string(s) + "; refine the grid");
      winding += d;
    }
    if (std::abs(winding - 2.0 * kPi) > 1e-6)
      throw ConversionError("curve does not have turning number 1");
  }
  return out;
}

VertexImmersion apply_lorentz(const VertexImmersion& im, const LorentzMap& M, double scale,
                              const Vec& shift) {
  if (scale == 0.0) throw ArgumentError("scale must be nonzero");
  VertexImmersion out = im;
  out.positions = (scale * M.matrix) * im.positions;
  out.positions.colwise() += shift;
  return out;
}

Vec center_of_mass(const GeometryCache& geo) { return geo.F * geo.dmu / geo.area; }

Vec center_of_mass(const VertexImmersion& im) { return center_of_mass(compute_geometry(im)); }

double projected_volume(const VertexImmersion& im, const LorentzMap& plane) {
  check_shapes(im.grid, im.space, im.positions);
  const Mat P = (inverse(im.space, plane).matrix * im.positions).topRows(im.space.n_space);
  const Differentiator D(im.grid);
  const Vec w = im.grid.coordinate_weights();
  double v = 0.0;
  if (im.grid.n == 1) {
    const Mat d = D.d(P, 0);
    for (int s = 0; s < im.grid.size(); ++s)
      v += 0.5 * (P(0, s) * d(1, s) - P(1, s) * d(0, s)) * w(s);
    return v;
  }
  const Mat d0 = D.d(P, 0), d1 = D.d(P, 1);
  for (int s = 0; s < im.grid.size(); ++s) {
    Eigen::Matrix3d M;
    M << P.col(s), d0.col(s), d1.col(s);
    v += M.determinant() / 3.0 * w(s);
  }
  return v;
}

double gauss_relation_residual(const GeometryCache& geo) {
  double r = 0.0;
  const int n = geo.n();
  for (int s = 0; s < geo.samples(); ++s)
    for (int ij = 0; ij < sym_count(n); ++ij)
      for (int k = 0; k < n; ++k) {
        const double den = geo.h[ij].col(s).norm() * geo.dF[k].col(s).norm();
        if (den > 0.0) r = std::max(r, std::abs(ip_col(geo.space, geo.h[ij], geo.dF[k], s)) / den);
      }
  return r;
}

double codazzi_residual(const GeometryCache& geo) {
  if (geo.n() == 1) return 0.0;
  const Differentiator D(geo.grid);
  auto par = [](int i, int j) { return pole_parity((i == 0) + (j == 0)); };
  const auto gam = [&](int m, int i, int j, int s) {
    return geo.christoffel[m * 3 + sym_index(i, j)](s);
  };
  double r = 0.0;
  for (int j = 0; j < 2; ++j) {
    const Mat d0h1j = D.d(geo.h[sym_index(1, j)], 0, par(1, j));
    const Mat d1h0j = D.d(geo.h[sym_index(0, j)], 1, par(0, j));
    for (int s = 0; s < geo.samples(); ++s) {
      Vec res = geo.normal_part(s, d0h1j.col(s) - d1h0j.col(s));
      for (int m = 0; m < 2; ++m)
        res += -gam(m, 0, j, s) * geo.h[sym_index(1, m)].col(s) +
               gam(m, 1, j, s) * geo.h[sym_index(0, m)].col(s);
      r = std::max(r, res.norm());
    }
  }
  return r;
}

Vec sectional_curvature(const GeometryCache& geo) {
  if (geo.n() != 2) throw ArgumentError("sectional curvature needs a surface");
  Vec K(geo.samples());
  for (int s = 0; s < geo.samples(); ++s) {
    const double det = geo.g[0](s) * geo.g[2](s) - geo.g[1](s) * geo.g[1](s);
    K(s) = (ip_col(geo.space, geo.h[0], geo.h[2], s) - ip_col(geo.space, geo.h[1], geo.h[1], s)) / det;
  }
  return K;
}

Vec intrinsic_curvature(const GeometryCache& geo) {
  if (geo.n() != 2) throw ArgumentError("intrinsic curvature needs a surface");
  const Differentiator D(geo.grid);
  const int S = geo.samples();
  auto G = [&](int m, int i, int j) -> const Vec& { return geo.christoffel[m * 3 + sym_index(i, j)]; };
  auto dG = [&](int m, int i, int j, int dir) {
    const int phis = (m == 0) + (i == 0) + (j == 0);
    return Vec(D.d(G(m, i, j).transpose(), dir, pole_parity(phis)).transpose());
  };
  // R^p_{101} = d_0 G^p_11 - d_1 G^p_10 + G^p_0m G^m_11 - G^p_1m G^m_10
  Vec K(S);
  std::vector<Vec> R(2);
  for (int p = 0; p < 2; ++p) {
    R[p] = dG(p, 1, 1, 0) - dG(p, 1, 0, 1);
    for (int m = 0; m < 2; ++m)
      R[p] += (G(p, 0, m).array() * G(m, 1, 1).array() - G(p, 1, m).array() * G(m, 1, 0).array())
                  .matrix();
  }
  for (int s = 0; s < S; ++s) {
    const double det = geo.g[0](s) * geo.g[2](s) - geo.g[1](s) * geo.g[1](s);
    K(s) = (geo.g[0](s) * R[0](s) + geo.g[1](s) * R[1](s)) / det;
  }
  return K;
}

double min_pair_separation2(const VertexImmersion& im) {
  const int S = im.samples(), ns = im.space.n_space, dim = im.space.dim();
  double best = std::numeric_limits<double>::infinity();
  Vec w(dim);
  for (int x = 0; x < S; ++x)
    for (int y = x + 1; y < S; ++y) {
      w = im.positions.col(y) - im.positions.col(x);
      best = std::min(best, ip(ns, w.data(), w.data(), dim));
    }
  return best;
}

}  // namespace lmcf
