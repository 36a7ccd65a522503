#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace lmcf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// R^{n_space, n_time} with the standard frame e_1..e_{n_space}, nu_1..nu_{n_time}.
struct SignatureSpace {
  int n_space = 2;
  int n_time = 1;

  SignatureSpace() = default;
  SignatureSpace(int n_space, int n_time);

  int dim() const { return n_space + n_time; }
  double sign(int a) const { return a < n_space ? 1.0 : -1.0; }
  Vec e(int i) const;
  Vec nu(int alpha) const;
  Vec metric_diagonal() const;
  bool operator==(const SignatureSpace& o) const {
    return n_space == o.n_space && n_time == o.n_time;
  }
};

double inner(const SignatureSpace& sp, const Vec& u, const Vec& v);
inline double norm2(const SignatureSpace& sp, const Vec& u) { return inner(sp, u, u); }

enum class Causal { spacelike, null, timelike };
const char* to_string(Causal c);

// Null band is rel_tol * (1 + |u|^2_companion) with the standard frame.
Causal causal_character(const SignatureSpace& sp, const Vec& u, double rel_tol = 1e-10);

double companion_inner(const SignatureSpace& sp, const Vec& u, const Vec& v,
                       const std::vector<Vec>& timelike_frame);
// Gram matrix G of the companion form, <<u,v>> = u^T G v.
Mat companion_gram(const SignatureSpace& sp, const std::vector<Vec>& timelike_frame);
std::vector<Vec> standard_timelike_frame(const SignatureSpace& sp);

Vec reflect(const SignatureSpace& sp, const Vec& u, const Vec& v);

// <u,H> > 0 and u spacelike.
bool is_inward_spacelike(const SignatureSpace& sp, const Vec& u, const Vec& H);
// <u, Hhat + c> > 0 for every sampled unit c in span(timelike_basis).
bool pairs_positively_with_null_cone(const SignatureSpace& sp, const Vec& u, const Vec& Hhat,
                                     const Mat& timelike_basis, int samples);

struct SvdAlignment {
  Mat e;       // orthonormal basis of U, columns
  Mat E;       // orthonormal basis of V, columns
  Vec lambda;
  Mat N;       // e_i - lambda_i E_i, orthogonal to V
};

// U, V: basis columns of two spacelike subspaces of equal dimension.
SvdAlignment spacelike_svd_align(const SignatureSpace& sp, const Mat& U, const Mat& V);

struct LorentzMap {
  enum class Kind { boost, spatial_rotation, composite };
  Mat matrix;
  Kind kind = Kind::composite;

  static LorentzMap identity(const SignatureSpace& sp);
  Vec apply(const Vec& v) const { return matrix * v; }
};

LorentzMap compose(const LorentzMap& a, const LorentzMap& b);  // a after b
LorentzMap inverse(const SignatureSpace& sp, const LorentzMap& m);
double metric_defect(const SignatureSpace& sp, const Mat& m);

// Boost slots: (i, alpha) -> i * n_time + alpha, (n_space * n_time) in total.
int boost_slot_count(const SignatureSpace& sp);
Mat boost_generator(const SignatureSpace& sp, int i, int alpha);
Mat boost_algebra(const SignatureSpace& sp, const Vec& coeffs);
LorentzMap boost_exp(const SignatureSpace& sp, const Vec& coeffs, double s);

// Deterministic, roughly uniform unit vectors on S^{k-1}; k = 1 gives {+1, -1}.
std::vector<Vec> unit_sphere_sample(int k, int count);

}  // namespace lmcf
