#pragma once

#include "lmcf/immersion.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lmcf {

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AcausalityError : public std::runtime_error {
 public:
  AcausalityError(int x, int y, double d2);
  int x, y;
  double d2;
};

// Per-sample normal frame: unit Hhat and a timelike orthonormal basis e_alpha of the normal
// directions orthogonal to H.
struct NormalFrame {
  Mat Hhat;              // dim x S
  Vec Hnorm;             // |H|
  std::vector<Mat> e;    // k entries, dim x S
};

// Requires |H|^2 > 0 at every sample.
NormalFrame normal_frame(const GeometryCache& geo);

// Inward null normals N with <N, H> = 1: (Hhat + c . e) / |H| for unit c in R^k.
struct NullNormalFan {
  NormalFrame frame;
  int sphere_samples = 64;

  // k = 1: the two normals; k >= 2: a Fibonacci / pseudo-random sample of S^{k-1}.
  std::vector<Vec> normals(int s) const;
};

NullNormalFan null_normal_fan(const GeometryCache& geo, int sphere_samples = 64);

// Extremes over unit tangent directions at one sample.
struct DirectionalExtremes {
  double margin;      // min |h(v,v)|^2
  double lower;       // min (p - |q|) / |H|, the inward threshold
  double upper;       // max (p + |q|) / |H|, the outward threshold
};

DirectionalExtremes directional_extremes(const GeometryCache& geo, const NormalFrame& frame, int s);

double convexity_margin(const GeometryCache& geo);

struct Pinching {
  double alpha;
  double beta;
};
Pinching pinching_ratios(const GeometryCache& geo);

struct NoncollapsingResult {
  double delta_minus = 0.0;
  double delta_plus = 0.0;
  bool minus_on_diagonal = false;
  bool plus_on_diagonal = false;
  double acausal_margin = 0.0;  // min d^2 over distinct samples
  double diameter2 = 0.0;       // max d^2
  double sep_a_min = 0.0;       // min <omega, Hhat_x> over pairs
  double sep_a_max = 0.0;       // max <omega, Hhat_x> |H_x|
  double sep_b_max = 0.0;       // max |(<omega, e_alpha(x)>)| |H_x|
  double cone_ratio_max = 0.0;  // max |b| / a
  double tilt_max = 0.0;        // max_{x,y} |(<H_y, e_alpha(x)>)|
};

// Exact inf/sup of Z over the null-normal sphere for every pair and on the diagonal.
NoncollapsingResult noncollapsing_deltas(const VertexImmersion& im, const GeometryCache& geo,
                                         const NullNormalFan& fan);

double tilt_bound(const VertexImmersion& im, const GeometryCache& geo, int x);

struct DiagnosticsRecord {
  double time = 0.0;
  double convex_margin = 0.0;
  double alpha = 0.0, beta = 0.0;
  double delta_minus = 0.0, delta_plus = 0.0;
  double acausal_margin = 0.0;
  double H2_min = 0.0, H2_max = 0.0;
  double diameter2 = 0.0;
  double area = 0.0;
  double tilt_max = 0.0;
  // Extras kept in the run log.
  bool minus_on_diagonal = false, plus_on_diagonal = false;
  double sep_a_min = 0.0, sep_a_max = 0.0, sep_b_max = 0.0, cone_ratio_max = 0.0;
};

DiagnosticsRecord diagnose(const VertexImmersion& im, const GeometryCache& geo, double time);

// Fixed CSV column order.
std::vector<std::string> diagnostics_columns();
std::vector<double> diagnostics_values(const DiagnosticsRecord& rec);

struct BoundCheck {
  std::string name;
  double lhs;
  double rhs;
  double slack;  // rhs - lhs
  bool holds;
};

// Diameter, curvature comparison, separation components and cone; a bound holds when
// slack >= -rel_tol * max(1, |rhs|).
std::vector<BoundCheck> bound_checks(const DiagnosticsRecord& rec, int n, double rel_tol = 1e-9);

}  // namespace lmcf
