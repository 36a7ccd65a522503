#pragma once

#include "lmcf/grid.hpp"
#include "lmcf/pseudo_linalg.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lmcf {

class DegenerateMetricError : public std::runtime_error {
 public:
  DegenerateMetricError(int sample, double min_eigenvalue);
  int sample;
  double min_eigenvalue;
};

class ConversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sampled embedding; positions has one column per grid sample.
struct VertexImmersion {
  GridSpec grid;
  SignatureSpace space;
  Mat positions;

  int samples() const { return grid.size(); }
};

// Support-function parameterization over the grid of S^n inside the plane `plane` (columns
// 0..n map the reference P onto the chosen maximal spacelike subspace).
struct GaussImmersion {
  GridSpec grid;
  SignatureSpace space;
  LorentzMap plane;
  Vec sigma;
  Mat eta;  // n_time x samples
};

// Symmetric index packing: n = 1 -> {00}; n = 2 -> {00, 01, 11}.
inline int sym_index(int i, int j) { return i + j; }
inline int sym_count(int n) { return n == 1 ? 1 : 3; }
// Sign of a field with `phi_indices` phi-slots under continuation across a pole.
inline int pole_parity(int phi_indices) { return phi_indices % 2 == 0 ? 1 : -1; }

struct GeometryCache {
  GridSpec grid;
  SignatureSpace space;
  Mat F;
  std::vector<Mat> dF;           // [i]: dim x S
  std::vector<Mat> ddF;          // [sym]: coordinate second derivatives (or their Gauss-route analog)
  std::vector<Vec> g, ginv;      // [sym]
  std::vector<Vec> christoffel;  // [k * sym_count + sym]
  std::vector<Mat> h;            // [sym]: normal part
  Mat H;
  Vec H2;  // |H|^2
  Vec dmu;
  double area = 0.0;
  double H2_min = 0.0, H2_max = 0.0;

  int n() const { return grid.n; }
  int samples() const { return grid.size(); }
  Mat metric(int s) const;
  Mat inverse_metric(int s) const;
  // h(v, v) at sample s for coordinate vector v.
  Vec h_vv(int s, const Vec& v) const;
  // Orthogonal projection of an ambient vector onto the normal space at s.
  Vec normal_part(int s, const Vec& w) const;
  // Coordinate vectors of a g-orthonormal tangent frame at s.
  Mat orthonormal_tangent_coords(int s) const;
};

GeometryCache compute_geometry(const VertexImmersion& im);
// Shared assembly from first and second coordinate derivatives. If `metric` is non-null it
// replaces <dF_i, dF_j>.
GeometryCache assemble_geometry(const GridSpec& grid, const SignatureSpace& space, Mat F,
                                std::vector<Mat> dF, std::vector<Mat> ddF,
                                const std::vector<Vec>* metric = nullptr);

GaussImmersion to_gauss(const VertexImmersion& im, const LorentzMap& plane);
VertexImmersion reconstruct(const GaussImmersion& gim, bool check = true);
GeometryCache gauss_geometry(const GaussImmersion& gim);

VertexImmersion apply_lorentz(const VertexImmersion& im, const LorentzMap& M, double scale,
                              const Vec& shift);

Vec center_of_mass(const VertexImmersion& im);
Vec center_of_mass(const GeometryCache& geo);

// Enclosed (n+1)-volume of the projection of the immersion onto the spatial factor after
// mapping by plane^{-1}; oriented so the standard sphere is positive.
double projected_volume(const VertexImmersion& im, const LorentzMap& plane);

// Max Euclidean size of the discrete Codazzi defect (zero for curves).
double codazzi_residual(const GeometryCache& geo);
// n = 2: sectional curvature from the Gauss equation, per sample.
Vec sectional_curvature(const GeometryCache& geo);
// n = 2: intrinsic Gaussian curvature from the metric alone (Christoffel route).
Vec intrinsic_curvature(const GeometryCache& geo);

// Max over samples and index pairs of |<h_ij, dF_k>| / (|h| |dF|), the tangential leak.
double gauss_relation_residual(const GeometryCache& geo);

// Minimal pairwise |F(y) - F(x)|^2 over distinct samples.
double min_pair_separation2(const VertexImmersion& im);

}  // namespace lmcf
