#include "lmcf/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace lmcf {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

double wavenumber(int q, int len) { return q <= len / 2 ? q : q - len; }

}  // namespace

GridSpec GridSpec::curve(int m, DerivativeScheme scheme) {
  GridSpec g;
  g.n = 1;
  g.m = m;
  g.scheme = scheme;
  g.validate();
  return g;
}

GridSpec GridSpec::sphere(int m_phi, int m_theta, DerivativeScheme scheme) {
  GridSpec g;
  g.n = 2;
  g.m_phi = m_phi;
  g.m_theta = m_theta;
  g.scheme = scheme;
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (n == 1) {
    if (m < 16 || m % 2 != 0)
      throw ArgumentError("curve grid needs an even sample count M >= 16 (got " +
                          std::to_string(m) + ")");
  } else if (n == 2) {
    if (m_phi < 9 || m_theta < 16)
      throw ArgumentError("sphere grid needs M_phi >= 9 and M_theta >= 16");
    if (m_theta % 2 != 0) throw ArgumentError("sphere grid needs an even M_theta");
  } else {
    throw ArgumentError("intrinsic dimension must be 1 or 2");
  }
}

double GridSpec::theta(int s) const {
  if (n == 1) return 2.0 * kPi * s / m;
  return 2.0 * kPi * (s % m_theta) / m_theta;
}

double GridSpec::phi(int s) const {
  if (n == 1) return 0.0;
  return (s / m_theta + 0.5) * kPi / m_phi;
}

Vec GridSpec::z(int s) const {
  const double t = theta(s);
  if (n == 1) {
    Vec v(2);
    v << std::cos(t), std::sin(t);
    return v;
  }
  const double p = phi(s);
  Vec v(3);
  v << std::sin(p) * std::cos(t), std::sin(p) * std::sin(t), std::cos(p);
  return v;
}

Vec fejer_weights(int N) {
  Vec w(N);
  for (int i = 0; i < N; ++i) {
    const double p = (i + 0.5) * kPi / N;
    double s = 0.0;
    for (int l = 1; l <= N / 2; ++l) s += std::cos(2.0 * l * p) / (4.0 * l * l - 1.0);
    w(i) = 2.0 / N * (1.0 - 2.0 * s);
  }
  return w;
}

Vec GridSpec::coordinate_weights() const {
  if (n == 1) return Vec::Constant(m, 2.0 * kPi / m);
  const Vec f = fejer_weights(m_phi);
  Vec w(size());
  for (int s = 0; s < size(); ++s) w(s) = f(s / m_theta) / std::sin(phi(s)) * 2.0 * kPi / m_theta;
  return w;
}

Vec GridSpec::round_weights() const {
  if (n == 1) return Vec::Constant(m, 2.0 * kPi / m);
  const Vec f = fejer_weights(m_phi);
  Vec w(size());
  for (int s = 0; s < size(); ++s) w(s) = f(s / m_theta) * 2.0 * kPi / m_theta;
  return w;
}

void periodic_derivatives(const double* in, int len, DerivativeScheme scheme, double* d1,
                          double* d2) {
  if (scheme == DerivativeScheme::fd4) {
    const double h = 2.0 * kPi / len;
    for (int i = 0; i < len; ++i) {
      const double fm2 = in[(i - 2 + len) % len], fm1 = in[(i - 1 + len) % len];
      const double fp1 = in[(i + 1) % len], fp2 = in[(i + 2) % len];
      if (d1) d1[i] = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
      if (d2) d2[i] = (-fp2 + 16.0 * fp1 - 30.0 * in[i] + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
    return;
  }
  thread_local std::vector<double> buf;
  thread_local std::vector<cd> spec, work;
  buf.assign(in, in + len);
  auto& fft = fft_engine();
  fft.fwd(spec, buf);
  if (d1) {
    work.resize(len);
    for (int q = 0; q < len; ++q) {
      const double k = (2 * q == len) ? 0.0 : wavenumber(q, len);
      work[q] = spec[q] * cd(0.0, k);
    }
    fft.inv(buf, work);
    std::copy(buf.begin(), buf.end(), d1);
  }
  if (d2) {
    work.resize(len);
    for (int q = 0; q < len; ++q) {
      const double k = wavenumber(q, len);
      work[q] = spec[q] * (-k * k);
    }
    fft.inv(buf, work);
    std::copy(buf.begin(), buf.end(), d2);
  }
}

Differentiator::Differentiator(const GridSpec& grid) : grid_(grid) { grid_.validate(); }

namespace {

// Apply a 1-D periodic operator along theta rows or along the pole-continued phi columns.
template <class Op>
Mat along(const GridSpec& g, const Mat& X, int dir, int parity, Op op) {
  Mat out(X.rows(), X.cols());
  std::vector<double> line, res;
  if (g.n == 1) {
    line.resize(g.m);
    res.resize(g.m);
    for (int r = 0; r < X.rows(); ++r) {
      for (int s = 0; s < g.m; ++s) line[s] = X(r, s);
      op(line.data(), g.m, res.data());
      for (int s = 0; s < g.m; ++s) out(r, s) = res[s];
    }
    return out;
  }
  const int mp = g.m_phi, mt = g.m_theta;
  if (dir == 1) {
    line.resize(mt);
    res.resize(mt);
    for (int r = 0; r < X.rows(); ++r)
      for (int i = 0; i < mp; ++i) {
        for (int j = 0; j < mt; ++j) line[j] = X(r, i * mt + j);
        op(line.data(), mt, res.data());
        for (int j = 0; j < mt; ++j) out(r, i * mt + j) = res[j];
      }
    return out;
  }
  const int len = 2 * mp;
  line.resize(len);
  res.resize(len);
  for (int r = 0; r < X.rows(); ++r)
    for (int j = 0; j < mt; ++j) {
      const int ja = (j + mt / 2) % mt;
      for (int i = 0; i < mp; ++i) {
        line[i] = X(r, i * mt + j);
        line[len - 1 - i] = parity * X(r, i * mt + ja);
      }
      op(line.data(), len, res.data());
      for (int i = 0; i < mp; ++i) out(r, i * mt + j) = res[i];
    }
  return out;
}

}  // namespace

Mat Differentiator::d(const Mat& X, int dir, int parity) const {
  const auto sch = grid_.scheme;
  return along(grid_, X, dir, parity, [sch](const double* in, int len, double* o) {
    periodic_derivatives(in, len, sch, o, nullptr);
  });
}

Mat Differentiator::dd(const Mat& X, int dir, int parity) const {
  const auto sch = grid_.scheme;
  return along(grid_, X, dir, parity, [sch](const double* in, int len, double* o) {
    periodic_derivatives(in, len, sch, nullptr, o);
  });
}

Mat Differentiator::dmixed(const Mat& X, int parity) const {
  if (grid_.n != 2) throw ArgumentError("mixed derivative needs a two-dimensional grid");
  return d(d(X, 1, parity), 0, parity);
}

namespace {

struct Modes {
  std::vector<double> k;
  std::vector<double> w;
  std::vector<int> idx;
};

Modes symmetric_modes(int len) {
  Modes m;
  for (int q = 0; q < len; ++q) {
    if (2 * q == len) {
      for (double sgn : {1.0, -1.0}) {
        m.k.push_back(sgn * len / 2);
        m.w.push_back(0.5);
        m.idx.push_back(q);
      }
    } else {
      m.k.push_back(wavenumber(q, len));
      m.w.push_back(1.0);
      m.idx.push_back(q);
    }
  }
  return m;
}

}  // namespace

FourierInterpolant::FourierInterpolant(const GridSpec& grid, const Mat& X, int parity)
    : grid_(grid), rows_(static_cast<int>(X.rows())) {
  auto& fft = fft_engine();
  if (grid.n == 1) {
    len0_ = grid.m;
    len1_ = 1;
    std::vector<double> line(len0_);
    std::vector<cd> spec;
    for (int r = 0; r < rows_; ++r) {
      for (int s = 0; s < len0_; ++s) line[s] = X(r, s);
      fft.fwd(spec, line);
      Eigen::MatrixXcd c(len0_, 1);
      for (int q = 0; q < len0_; ++q) c(q, 0) = spec[q] / static_cast<double>(len0_);
      coeff_.push_back(c);
    }
    return;
  }
  const int mp = grid.m_phi, mt = grid.m_theta;
  len0_ = 2 * mp;
  len1_ = mt;
  std::vector<cd> line, spec;
  for (int r = 0; r < rows_; ++r) {
    Eigen::MatrixXcd ext(len0_, len1_);
    for (int j = 0; j < mt; ++j) {
      const int ja = (j + mt / 2) % mt;
      for (int i = 0; i < mp; ++i) {
        ext(i, j) = X(r, i * mt + j);
        ext(len0_ - 1 - i, j) = parity * X(r, i * mt + ja);
      }
    }
    line.resize(len1_);
    for (int i = 0; i < len0_; ++i) {
      for (int j = 0; j < len1_; ++j) line[j] = ext(i, j);
      fft.fwd(spec, line);
      for (int j = 0; j < len1_; ++j) ext(i, j) = spec[j];
    }
    line.resize(len0_);
    for (int j = 0; j < len1_; ++j) {
      for (int i = 0; i < len0_; ++i) line[i] = ext(i, j);
      fft.fwd(spec, line);
      for (int i = 0; i < len0_; ++i) ext(i, j) = spec[i];
    }
    coeff_.push_back(ext / static_cast<double>(len0_ * len1_));
  }
}

std::array<Vec, 6> FourierInterpolant::eval(double u0, double u1) const {
  std::array<Vec, 6> out;
  for (auto& v : out) v = Vec::Zero(rows_);
  if (grid_.n == 1) {
    const Modes md = symmetric_modes(len0_);
    const int nm = static_cast<int>(md.k.size());
    Eigen::VectorXcd e0(nm), e1(nm), e2(nm);
    for (int q = 0; q < nm; ++q) {
      const cd e = std::polar(md.w[q], md.k[q] * u0);
      e0(q) = e;
      e1(q) = e * cd(0.0, md.k[q]);
      e2(q) = -e * (md.k[q] * md.k[q]);
    }
    for (int r = 0; r < rows_; ++r) {
      cd v0 = 0, v1 = 0, v2 = 0;
      for (int q = 0; q < nm; ++q) {
        const cd c = coeff_[r](md.idx[q], 0);
        v0 += c * e0(q);
        v1 += c * e1(q);
        v2 += c * e2(q);
      }
      out[0](r) = v0.real();
      out[1](r) = v1.real();
      out[3](r) = v2.real();
    }
    return out;
  }
  const double h = kPi / grid_.m_phi;
  const double p = u0 - 0.5 * h;
  const Modes m0 = symmetric_modes(len0_), m1 = symmetric_modes(len1_);
  const int n0 = static_cast<int>(m0.k.size()), n1 = static_cast<int>(m1.k.size());
  Eigen::VectorXcd a0(n0), a1(n0), a2(n0), b0(n1), b1(n1), b2(n1);
  for (int q = 0; q < n0; ++q) {
    const cd e = std::polar(m0.w[q], m0.k[q] * p);
    a0(q) = e;
    a1(q) = e * cd(0.0, m0.k[q]);
    a2(q) = -e * (m0.k[q] * m0.k[q]);
  }
  for (int q = 0; q < n1; ++q) {
    const cd e = std::polar(m1.w[q], m1.k[q] * u1);
    b0(q) = e;
    b1(q) = e * cd(0.0, m1.k[q]);
    b2(q) = -e * (m1.k[q] * m1.k[q]);
  }
  for (int r = 0; r < rows_; ++r) {
    Eigen::MatrixXcd C(n0, n1);
    for (int q0 = 0; q0 < n0; ++q0)
      for (int q1 = 0; q1 < n1; ++q1) C(q0, q1) = coeff_[r](m0.idx[q0], m1.idx[q1]);
    const Eigen::VectorXcd Cb0 = C * b0, Cb1 = C * b1, Cb2 = C * b2;
    out[0](r) = (a0.transpose() * Cb0)(0).real();
    out[1](r) = (a1.transpose() * Cb0)(0).real();
    out[2](r) = (a0.transpose() * Cb1)(0).real();
    out[3](r) = (a2.transpose() * Cb0)(0).real();
    out[4](r) = (a1.transpose() * Cb1)(0).real();
    out[5](r) = (a0.transpose() * Cb2)(0).real();
  }
  return out;
}

Vec FourierInterpolant::value(double u0, double u1) const { return eval(u0, u1)[0]; }

double real_spherical_harmonic(int l, int m, double phi, double theta) {
  if (l < 0 || std::abs(m) > l) throw ArgumentError("spherical harmonic needs |m| <= l");
  const double leg = std::sph_legendre(l, std::abs(m), phi);
  if (m == 0) return leg;
  return std::sqrt(2.0) * leg * (m > 0 ? std::cos(m * theta) : std::sin(-m * theta));
}

Mat resample(const GridSpec& from, const Mat& X, const GridSpec& to) {
  if (from.n != to.n) throw ArgumentError("resample between grids of different dimension");
  FourierInterpolant fi(from, X);
  Mat out(X.rows(), to.size());
  for (int s = 0; s < to.size(); ++s)
    out.col(s) = to.n == 1 ? fi.value(to.theta(s)) : fi.value(to.phi(s), to.theta(s));
  return out;
}

void spectral_filter(const GridSpec& grid, Mat& X, int order) {
  if (grid.n != 1) return;
  const int len = grid.m;
  const double kmax = len / 2;
  std::vector<double> buf(len);
  std::vector<cd> spec;
  auto& fft = fft_engine();
  for (int r = 0; r < X.rows(); ++r) {
    for (int s = 0; s < len; ++s) buf[s] = X(r, s);
    fft.fwd(spec, buf);
    for (int q = 0; q < len; ++q) {
      const double k = std::abs(wavenumber(q, len));
      spec[q] *= 2 * q == len ? 0.0 : std::exp(-36.0 * std::pow(k / kmax, order));
    }
    fft.inv(buf, spec);
    for (int s = 0; s < len; ++s) X(r, s) = buf[s];
  }
}

}  // namespace lmcf
