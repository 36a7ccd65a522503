#include "lmcf/pseudo_linalg.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

namespace lmcf {

SignatureSpace::SignatureSpace(int n_space_, int n_time_) : n_space(n_space_), n_time(n_time_) {
  if (n_space < 2) throw ArgumentError("signature needs at least 2 spacelike dimensions");
  if (n_time < 0) throw ArgumentError("signature needs a nonnegative timelike dimension");
}

Vec SignatureSpace::e(int i) const {
  Vec v = Vec::Zero(dim());
  v(i) = 1.0;
  return v;
}

Vec SignatureSpace::nu(int alpha) const {
  Vec v = Vec::Zero(dim());
  v(n_space + alpha) = 1.0;
  return v;
}

Vec SignatureSpace::metric_diagonal() const {
  Vec d(dim());
  for (int a = 0; a < dim(); ++a) d(a) = sign(a);
  return d;
}

static void check_dim(const SignatureSpace& sp, const Vec& u) {
  if (u.size() != sp.dim())
    throw ArgumentError("vector of length " + std::to_string(u.size()) +
                        " does not match signature dimension " + std::to_string(sp.dim()));
}

double inner(const SignatureSpace& sp, const Vec& u, const Vec& v) {
  check_dim(sp, u);
  check_dim(sp, v);
  double s = 0.0, t = 0.0;
  for (int i = 0; i < sp.n_space; ++i) s += u(i) * v(i);
  for (int a = sp.n_space; a < sp.dim(); ++a) t += u(a) * v(a);
  return s - t;
}

const char* to_string(Causal c) {
  switch (c) {
    case Causal::spacelike: return "spacelike";
    case Causal::null: return "null";
    case Causal::timelike: return "timelike";
  }
  return "?";
}

Causal causal_character(const SignatureSpace& sp, const Vec& u, double rel_tol) {
  check_dim(sp, u);
  const double e2 = u.squaredNorm();
  if (e2 == 0.0) throw ArgumentError("causal character of the zero vector is undefined");
  const double q = inner(sp, u, u);
  const double tol = rel_tol * (1.0 + e2);
  if (q > tol) return Causal::spacelike;
  if (q < -tol) return Causal::timelike;
  return Causal::null;
}

static void check_timelike_frame(const SignatureSpace& sp, const std::vector<Vec>& frame) {
  if (static_cast<int>(frame.size()) != sp.n_time)
    throw ArgumentError("timelike frame must have exactly n_time vectors");
  for (size_t a = 0; a < frame.size(); ++a) {
    check_dim(sp, frame[a]);
    for (size_t b = a; b < frame.size(); ++b) {
      const double want = a == b ? -1.0 : 0.0;
      if (std::abs(inner(sp, frame[a], frame[b]) - want) > 1e-10)
        throw ArgumentError("timelike frame is not orthonormal");
    }
  }
}

Mat companion_gram(const SignatureSpace& sp, const std::vector<Vec>& frame) {
  check_timelike_frame(sp, frame);
  Mat G = sp.metric_diagonal().asDiagonal();
  for (const Vec& nu : frame) {
    const Vec w = sp.metric_diagonal().cwiseProduct(nu);  // <., nu> as a covector
    G += 2.0 * w * w.transpose();
  }
  return G;
}

double companion_inner(const SignatureSpace& sp, const Vec& u, const Vec& v,
                       const std::vector<Vec>& frame) {
  check_timelike_frame(sp, frame);
  double s = inner(sp, u, v);
  for (const Vec& nu : frame) s += 2.0 * inner(sp, u, nu) * inner(sp, v, nu);
  return s;
}

std::vector<Vec> standard_timelike_frame(const SignatureSpace& sp) {
  std::vector<Vec> f;
  for (int a = 0; a < sp.n_time; ++a) f.push_back(sp.nu(a));
  return f;
}

Vec reflect(const SignatureSpace& sp, const Vec& u, const Vec& v) {
  if (std::abs(inner(sp, u, u) - 1.0) > 1e-10)
    throw ArgumentError("reflection axis must be unit spacelike");
  return v - 2.0 * inner(sp, u, v) * u;
}

bool is_inward_spacelike(const SignatureSpace& sp, const Vec& u, const Vec& H) {
  return inner(sp, u, H) > 0.0 && causal_character(sp, u) == Causal::spacelike;
}

bool pairs_positively_with_null_cone(const SignatureSpace& sp, const Vec& u, const Vec& Hhat,
                                     const Mat& timelike_basis, int samples) {
  const int k = static_cast<int>(timelike_basis.cols());
  if (k == 0) return inner(sp, u, Hhat) > 0.0;
  for (const Vec& c : unit_sphere_sample(k, samples)) {
    const Vec n = Hhat + timelike_basis * c;
    if (inner(sp, u, n) <= 0.0) return false;
  }
  return true;
}

static Mat orthonormalize_spacelike(const SignatureSpace& sp, const Mat& B, const char* which) {
  const Mat G = B.transpose() * sp.metric_diagonal().asDiagonal() * B;
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw ArgumentError(std::string("subspace ") + which + " is not spacelike");
  Eigen::LLT<Mat> llt(G);
  return llt.matrixL().solve(B.transpose()).transpose();
}

SvdAlignment spacelike_svd_align(const SignatureSpace& sp, const Mat& U, const Mat& V) {
  if (U.rows() != sp.dim() || V.rows() != sp.dim() || U.cols() != V.cols() || U.cols() == 0)
    throw ArgumentError("subspace bases must be nonempty with matching shapes");
  const Mat Uh = orthonormalize_spacelike(sp, U, "U");
  const Mat Vh = orthonormalize_spacelike(sp, V, "V");
  const Mat C = Vh.transpose() * sp.metric_diagonal().asDiagonal() * Uh;
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdAlignment out;
  out.e = Uh * svd.matrixV();
  out.E = Vh * svd.matrixU();
  out.lambda = svd.singularValues();
  out.N = out.e - out.E * out.lambda.asDiagonal();
  return out;
}

LorentzMap LorentzMap::identity(const SignatureSpace& sp) {
  return {Mat::Identity(sp.dim(), sp.dim()), Kind::composite};
}

LorentzMap compose(const LorentzMap& a, const LorentzMap& b) {
  return {a.matrix * b.matrix, LorentzMap::Kind::composite};
}

LorentzMap inverse(const SignatureSpace& sp, const LorentzMap& m) {
  const Vec d = sp.metric_diagonal();
  return {d.asDiagonal() * m.matrix.transpose() * d.asDiagonal(), m.kind};
}

double metric_defect(const SignatureSpace& sp, const Mat& m) {
  const Vec d = sp.metric_diagonal();
  const Mat eta = d.asDiagonal();
  return (m.transpose() * eta * m - eta).cwiseAbs().maxCoeff();
}

int boost_slot_count(const SignatureSpace& sp) { return sp.n_space * sp.n_time; }

Mat boost_generator(const SignatureSpace& sp, int i, int alpha) {
  Mat L = Mat::Zero(sp.dim(), sp.dim());
  L(sp.n_space + alpha, i) = 1.0;
  L(i, sp.n_space + alpha) = 1.0;
  return L;
}

Mat boost_algebra(const SignatureSpace& sp, const Vec& coeffs) {
  if (coeffs.size() != boost_slot_count(sp)) throw ArgumentError("boost coefficient length mismatch");
  Mat L = Mat::Zero(sp.dim(), sp.dim());
  for (int i = 0; i < sp.n_space; ++i)
    for (int a = 0; a < sp.n_time; ++a) {
      const double c = coeffs(i * sp.n_time + a);
      L(sp.n_space + a, i) = c;
      L(i, sp.n_space + a) = c;
    }
  return L;
}

LorentzMap boost_exp(const SignatureSpace& sp, const Vec& coeffs, double s) {
  if (coeffs.size() != boost_slot_count(sp)) throw ArgumentError("boost coefficient length mismatch");
  const int n = sp.n_space, k = sp.n_time;
  LorentzMap out{Mat::Identity(sp.dim(), sp.dim()), LorentzMap::Kind::boost};
  if (k == 0) return out;
  Mat C(n, k);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < k; ++a) C(i, a) = s * coeffs(i * k + a);
  // exp [[0, C], [C^T, 0]] in closed form through the SVD C = U S V^T.
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Mat& U = svd.matrixU();
  const Mat& V = svd.matrixV();
  const Vec S = svd.singularValues();
  const Vec ch = S.array().cosh() - 1.0;
  const Vec sh = S.array().sinh();
  out.matrix.topLeftCorner(n, n) += U * ch.asDiagonal() * U.transpose();
  out.matrix.bottomRightCorner(k, k) += V * ch.asDiagonal() * V.transpose();
  out.matrix.topRightCorner(n, k) = U * sh.asDiagonal() * V.transpose();
  out.matrix.bottomLeftCorner(k, n) = V * sh.asDiagonal() * U.transpose();
  return out;
}

std::vector<Vec> unit_sphere_sample(int k, int count) {
  std::vector<Vec> pts;
  if (k <= 0) return pts;
  if (k == 1) {
    pts.push_back(Vec::Constant(1, 1.0));
    pts.push_back(Vec::Constant(1, -1.0));
    return pts;
  }
  if (k == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * i / count;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      pts.push_back(v);
    }
    return pts;
  }
  if (k == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(1.0 - z * z);
      Vec v(3);
      v << r * std::cos(golden * i), r * std::sin(golden * i), z;
      pts.push_back(v);
    }
    return pts;
  }
  std::mt19937_64 rng(0x5eedULL);
  auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  for (int i = 0; i < count; ++i) {
    Vec v(k);
    for (int j = 0; j < k; ++j)
      v(j) = std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * std::numbers::pi * uniform());
    pts.push_back(v.normalized());
  }
  return pts;
}

}  // namespace lmcf
