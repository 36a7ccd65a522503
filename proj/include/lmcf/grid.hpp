#pragma once

#include "lmcf/pseudo_linalg.hpp"

#include <array>

namespace lmcf {

enum class DerivativeScheme { spectral, fd4 };

// n = 1: theta_j = 2 pi j / m.
// n = 2: pole-free latitude rows phi_i = (i + 1/2) pi / m_phi, longitudes theta_j = 2 pi j / m_theta,
// sample index s = i * m_theta + j. Rows are continued across the poles through the antipodal
// longitude (ghost rows), which makes every latitude line a periodic column of length 2 m_phi.
struct GridSpec {
  int n = 1;
  int m = 0;
  int m_phi = 0;
  int m_theta = 0;
  DerivativeScheme scheme = DerivativeScheme::spectral;

  static GridSpec curve(int m, DerivativeScheme scheme = DerivativeScheme::spectral);
  static GridSpec sphere(int m_phi, int m_theta,
                         DerivativeScheme scheme = DerivativeScheme::spectral);

  void validate() const;
  int size() const { return n == 1 ? m : m_phi * m_theta; }
  double theta(int s) const;
  double phi(int s) const;
  // Unit vector z in R^{n+1} for sample s (the round sphere point).
  Vec z(int s) const;
  // Quadrature weights for integrals in the coordinate measure (dtheta, or dphi dtheta).
  // Exact for integrands of the form smooth-density * sin(phi) on S^2.
  Vec coordinate_weights() const;
  // Weights for integrals against the round measure on S^n.
  Vec round_weights() const;
  bool operator==(const GridSpec& o) const {
    return n == o.n && m == o.m && m_phi == o.m_phi && m_theta == o.m_theta;
  }
};

// First-rule Fejer weights for int_0^pi f(phi) sin(phi) dphi at the pole-free nodes.
Vec fejer_weights(int m_phi);

// Periodic differentiation over the grid. Rows of the input are independent scalar fields;
// `parity` is the sign picked up by the field under the continuation across a pole
// (-1 for quantities carrying an odd number of phi indices).
class Differentiator {
 public:
  explicit Differentiator(const GridSpec& grid);

  // dir: 0 = theta for n = 1; for n = 2, 0 = phi and 1 = theta.
  Mat d(const Mat& X, int dir, int parity = 1) const;
  Mat dd(const Mat& X, int dir, int parity = 1) const;
  Mat dmixed(const Mat& X, int parity = 1) const;  // d_phi d_theta, n = 2

  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
};

// Low-level periodic derivative of a sampled function on [0, 2 pi).
void periodic_derivatives(const double* in, int len, DerivativeScheme scheme, double* d1,
                          double* d2);

// Trigonometric interpolant of periodic data (n = 1) or of the double-covered sphere grid (n = 2).
class FourierInterpolant {
 public:
  FourierInterpolant(const GridSpec& grid, const Mat& X, int parity = 1);

  // Value and coordinate derivatives at a parameter point (theta) or (phi, theta).
  // Returns columns: value, d0, d1, d00, d01, d11 (entries beyond n unused).
  std::array<Vec, 6> eval(double u0, double u1 = 0.0) const;
  Vec value(double u0, double u1 = 0.0) const;

 private:
  GridSpec grid_;
  int rows_ = 0;
  int len0_ = 0, len1_ = 0;
  // coefficients: real cos / sin expansions stored as complex per row
  std::vector<Eigen::MatrixXcd> coeff_;  // per row: len0 x len1 (n=2) or len0 x 1
};

// Orthonormal real spherical harmonic on S^2: sqrt(2) cos(m theta) for m > 0, sqrt(2) sin(|m| theta)
// for m < 0, with the associated Legendre factor in the polar angle phi.
double real_spherical_harmonic(int l, int m, double phi, double theta);

// Spectral resampling to a finer grid of the same kind (factor >= 1).
Mat resample(const GridSpec& from, const Mat& X, const GridSpec& to);

// Exponential low-pass filter exp(-36 (|k| / k_max)^order) on each row of curve samples; the
// Nyquist mode is removed. No-op on surface grids.
void spectral_filter(const GridSpec& grid, Mat& X, int order = 36);

}  // namespace lmcf
