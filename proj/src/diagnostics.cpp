#include "lmcf/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace lmcf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSweep = 64;

// Golden-section refinement of a 1-periodic-in-pi angle objective around psi0.
template <class Fn>
double refine_angle(Fn f, double psi0, bool minimize) {
  const double sgn = minimize ? 1.0 : -1.0;
  double a = psi0 - kPi / kSweep, b = psi0 + kPi / kSweep;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = sgn * f(c), fd = sgn * f(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a);
      fc = sgn * f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a);
      fd = sgn * f(d);
    }
  }
  return sgn * std::min({fc, fd, sgn * f(psi0)});
}

template <class Fn>
double sweep(Fn f, bool minimize) {
  double best = minimize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int i = 0; i < kSweep; ++i) {
    const double psi = kPi * i / kSweep;
    const double v = f(psi);
    if (minimize ? v < best : v > best) best = v, arg = psi;
  }
  const double r = refine_angle(f, arg, minimize);
  return minimize ? std::min(best, r) : std::max(best, r);
}

// h in a g-orthonormal tangent frame: entries (11, 12, 22) for surfaces, (11) for curves.
std::vector<Vec> orthonormal_h(const GeometryCache& geo, int s) {
  const Mat E = geo.orthonormal_tangent_coords(s);
  const int n = geo.n();
  std::vector<Vec> out;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Vec v = Vec::Zero(geo.space.dim());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v += E(i, a) * E(j, b) * geo.h[sym_index(i, j)].col(s);
      out.push_back(v);
    }
  return out;
}

std::array<double, 3> angle_weights(double psi) {
  const double c = std::cos(psi), s = std::sin(psi);
  return {c * c, 2.0 * c * s, s * s};
}

}  // namespace

AcausalityError::AcausalityError(int x_, int y_, double d2_)
    : std::runtime_error("causal pair of samples (" + std::to_string(x_) + ", " +
                         std::to_string(y_) + ") with |F(y) - F(x)|^2 = " + std::to_string(d2_)),
      x(x_),
      y(y_),
      d2(d2_) {}

NormalFrame normal_frame(const GeometryCache& geo) {
  const SignatureSpace& sp = geo.space;
  const int S = geo.samples(), dim = sp.dim(), k = sp.n_time;
  NormalFrame fr;
  fr.Hhat = Mat(dim, S);
  fr.Hnorm = Vec(S);
  fr.e.assign(k, Mat(dim, S));
  for (int s = 0; s < S; ++s) {
    if (!(geo.H2(s) > 0.0))
      throw PreconditionError("mean curvature is not spacelike at sample " + std::to_string(s));
    fr.Hnorm(s) = std::sqrt(geo.H2(s));
    const Vec hh = geo.H.col(s) / fr.Hnorm(s);
    fr.Hhat.col(s) = hh;
    int found = 0;
    for (int c = 0; c < dim && found < k; ++c) {
      const int axis = (c < k) ? sp.n_space + c : c - k;  // nu's first, then e_i
      Vec w = geo.normal_part(s, sp.e(axis));
      w -= inner(sp, w, hh) * hh;
      for (int b = 0; b < found; ++b) {
        const Vec eb = fr.e[b].col(s);
        w += inner(sp, w, eb) * eb;
      }
      const double q = -inner(sp, w, w);
      if (q > 1e-6) {
        fr.e[found].col(s) = w / std::sqrt(q);
        ++found;
      }
    }
    if (found != k)
      throw PreconditionError("normal space has no timelike complement at sample " + std::to_string(s));
  }
  return fr;
}

std::vector<Vec> NullNormalFan::normals(int s) const {
  const int k = static_cast<int>(frame.e.size());
  std::vector<Vec> out;
  const Vec hh = frame.Hhat.col(s);
  if (k == 0) {
    out.push_back(hh / frame.Hnorm(s));
    return out;
  }
  for (const Vec& c : unit_sphere_sample(k, sphere_samples)) {
    Vec v = hh;
    for (int a = 0; a < k; ++a) v += c(a) * frame.e[a].col(s);
    out.push_back(v / frame.Hnorm(s));
  }
  return out;
}

NullNormalFan null_normal_fan(const GeometryCache& geo, int sphere_samples) {
  return NullNormalFan{normal_frame(geo), sphere_samples};
}

DirectionalExtremes directional_extremes(const GeometryCache& geo, const NormalFrame& frame, int s) {
  const SignatureSpace& sp = geo.space;
  const int k = sp.n_time;
  const std::vector<Vec> hab = orthonormal_h(geo, s);
  const int m = static_cast<int>(hab.size());
  const Vec hh = frame.Hhat.col(s);
  std::vector<double> p(m);
  std::vector<Vec> q(m, Vec(k));
  Mat gram(m, m);
  for (int u = 0; u < m; ++u) {
    p[u] = inner(sp, hab[u], hh);
    for (int a = 0; a < k; ++a) q[u](a) = inner(sp, hab[u], frame.e[a].col(s));
    for (int v = 0; v < m; ++v) gram(u, v) = inner(sp, hab[u], hab[v]);
  }
  const double Hn = frame.Hnorm(s);
  if (m == 1) {
    const double qn = q[0].norm();
    return {gram(0, 0), (p[0] - qn) / Hn, (p[0] + qn) / Hn};
  }
  auto pq = [&](double psi, double& pv, double& qv) {
    const auto w = angle_weights(psi);
    pv = w[0] * p[0] + w[1] * p[1] + w[2] * p[2];
    qv = (w[0] * q[0] + w[1] * q[1] + w[2] * q[2]).norm();
  };
  auto lower = [&](double psi) {
    double pv, qv;
    pq(psi, pv, qv);
    return (pv - qv) / Hn;
  };
  auto upper = [&](double psi) {
    double pv, qv;
    pq(psi, pv, qv);
    return (pv + qv) / Hn;
  };
  auto margin = [&](double psi) {
    const auto w = angle_weights(psi);
    double v = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) v += w[a] * w[b] * gram(a, b);
    return v;
  };
  return {sweep(margin, true), sweep(lower, true), sweep(upper, false)};
}

double convexity_margin(const GeometryCache& geo) {
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < geo.samples(); ++s) {
    const std::vector<Vec> hab = orthonormal_h(geo, s);
    const int m = static_cast<int>(hab.size());
    Mat gram(m, m);
    for (int u = 0; u < m; ++u)
      for (int v = 0; v < m; ++v) gram(u, v) = inner(geo.space, hab[u], hab[v]);
    if (m == 1) {
      best = std::min(best, gram(0, 0));
      continue;
    }
    best = std::min(best, sweep(
                              [&](double psi) {
                                const auto w = angle_weights(psi);
                                double v = 0.0;
                                for (int a = 0; a < 3; ++a)
                                  for (int b = 0; b < 3; ++b) v += w[a] * w[b] * gram(a, b);
                                return v;
                              },
                              true));
  }
  return best;
}

Pinching pinching_ratios(const GeometryCache& geo) {
  if (!(convexity_margin(geo) > 0.0))
    throw PreconditionError("pinching ratios need a spacelike-convex immersion");
  const NormalFrame fr = normal_frame(geo);
  Pinching out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int s = 0; s < geo.samples(); ++s) {
    const auto ex = directional_extremes(geo, fr, s);
    out.alpha = std::min(out.alpha, ex.lower);
    out.beta = std::max(out.beta, ex.upper);
  }
  return out;
}

namespace {

NoncollapsingResult pair_pass(const VertexImmersion& im, const GeometryCache& geo,
                              const NormalFrame& fr, const std::vector<DirectionalExtremes>& ext) {
  const SignatureSpace& sp = im.space;
  const int S = im.samples(), k = sp.n_time, dim = sp.dim();
  const Vec eta = sp.metric_diagonal();
  // Metric-weighted frame vectors, so every pairing below is a plain dot product with a chord.
  const Mat Hw = eta.asDiagonal() * fr.Hhat;
  std::vector<Mat> Ew(k);
  for (int a = 0; a < k; ++a) Ew[a] = eta.asDiagonal() * fr.e[a];
  const double* F = im.positions.data();
  const double* Hy = geo.H.data();
  const double* sg = eta.data();

  NoncollapsingResult r;
  r.delta_minus = std::numeric_limits<double>::infinity();
  r.delta_plus = -std::numeric_limits<double>::infinity();
  r.acausal_margin = std::numeric_limits<double>::infinity();
  r.sep_a_min = std::numeric_limits<double>::infinity();
  std::vector<double> w(dim);
  for (int x = 0; x < S; ++x) {
    const double hx = fr.Hnorm(x);
    if (ext[x].lower < r.delta_minus) r.delta_minus = ext[x].lower, r.minus_on_diagonal = true;
    if (ext[x].upper > r.delta_plus) r.delta_plus = ext[x].upper, r.plus_on_diagonal = true;
    const double* fx = F + static_cast<size_t>(x) * dim;
    const double* hw = Hw.col(x).data();
    double zmin = std::numeric_limits<double>::infinity(), zmax = -zmin;
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    double amin = dmin, amax = 0.0, bmax = 0.0, cone = 0.0, tilt2 = 0.0;
    int causal = -1;
    double causal_d2 = 0.0;
    for (int y = 0; y < S; ++y) {
      double t2 = 0.0;
      const double* hy = Hy + static_cast<size_t>(y) * dim;
      for (int al = 0; al < k; ++al) {
        const double* ew = Ew[al].col(x).data();
        double v = 0.0;
        for (int c = 0; c < dim; ++c) v += ew[c] * hy[c];
        t2 += v * v;
      }
      tilt2 = std::max(tilt2, t2);
      if (y == x) continue;
      const double* fy = F + static_cast<size_t>(y) * dim;
      double d2 = 0.0, a = 0.0;
      for (int c = 0; c < dim; ++c) {
        w[c] = fy[c] - fx[c];
        d2 += sg[c] * w[c] * w[c];
        a += hw[c] * w[c];
      }
      double b2 = 0.0, b1 = 0.0;
      for (int al = 0; al < k; ++al) {
        const double* ew = Ew[al].col(x).data();
        double v = 0.0;
        for (int c = 0; c < dim; ++c) v += ew[c] * w[c];
        b2 += v * v;
        b1 = v;
      }
      if (!(d2 > 0.0)) causal = y, causal_d2 = d2;
      const double b = k == 1 ? std::abs(b1) : std::sqrt(b2);
      const double inv = 2.0 / (hx * d2);
      zmin = std::min(zmin, (a - b) * inv);
      zmax = std::max(zmax, (a + b) * inv);
      dmin = std::min(dmin, d2);
      dmax = std::max(dmax, d2);
      amin = std::min(amin, a);
      amax = std::max(amax, a);
      bmax = std::max(bmax, b);
      if (a > 0.0) cone = std::max(cone, b / a);
    }
    if (causal >= 0) throw AcausalityError(x, causal, causal_d2);
    if (zmin < r.delta_minus) r.delta_minus = zmin, r.minus_on_diagonal = false;
    if (zmax > r.delta_plus) r.delta_plus = zmax, r.plus_on_diagonal = false;
    r.acausal_margin = std::min(r.acausal_margin, dmin);
    r.diameter2 = std::max(r.diameter2, dmax);
    r.sep_a_min = std::min(r.sep_a_min, amin);
    r.sep_a_max = std::max(r.sep_a_max, amax * hx);
    r.sep_b_max = std::max(r.sep_b_max, bmax * hx);
    r.cone_ratio_max = std::max(r.cone_ratio_max, cone);
    r.tilt_max = std::max(r.tilt_max, std::sqrt(tilt2));
  }
  return r;
}

}  // namespace

NoncollapsingResult noncollapsing_deltas(const VertexImmersion& im, const GeometryCache& geo,
                                         const NullNormalFan& fan) {
  if (!(geo.H2_min > 0.0)) throw PreconditionError("noncollapsing needs spacelike mean curvature");
  std::vector<DirectionalExtremes> ext(geo.samples());
  for (int s = 0; s < geo.samples(); ++s) ext[s] = directional_extremes(geo, fan.frame, s);
  return pair_pass(im, geo, fan.frame, ext);
}

double tilt_bound(const VertexImmersion& im, const GeometryCache& geo, int x) {
  const NormalFrame fr = normal_frame(geo);
  double best = 0.0;
  for (int y = 0; y < im.samples(); ++y) {
    double t2 = 0.0;
    for (const Mat& e : fr.e) {
      const double v = inner(im.space, geo.H.col(y), e.col(x));
      t2 += v * v;
    }
    best = std::max(best, std::sqrt(t2));
  }
  return best;
}

DiagnosticsRecord diagnose(const VertexImmersion& im, const GeometryCache& geo, double time) {
  DiagnosticsRecord rec;
  rec.time = time;
  rec.area = geo.area;
  rec.H2_min = geo.H2_min;
  rec.H2_max = geo.H2_max;
  const NormalFrame fr = normal_frame(geo);
  std::vector<DirectionalExtremes> ext(geo.samples());
  rec.convex_margin = std::numeric_limits<double>::infinity();
  rec.alpha = std::numeric_limits<double>::infinity();
  rec.beta = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < geo.samples(); ++s) {
    ext[s] = directional_extremes(geo, fr, s);
    rec.convex_margin = std::min(rec.convex_margin, ext[s].margin);
    rec.alpha = std::min(rec.alpha, ext[s].lower);
    rec.beta = std::max(rec.beta, ext[s].upper);
  }
  if (!(rec.convex_margin > 0.0)) rec.alpha = rec.beta = std::numeric_limits<double>::quiet_NaN();
  const NoncollapsingResult nc = pair_pass(im, geo, fr, ext);
  rec.delta_minus = nc.delta_minus;
  rec.delta_plus = nc.delta_plus;
  rec.acausal_margin = nc.acausal_margin;
  rec.diameter2 = nc.diameter2;
  rec.tilt_max = nc.tilt_max;
  rec.minus_on_diagonal = nc.minus_on_diagonal;
  rec.plus_on_diagonal = nc.plus_on_diagonal;
  rec.sep_a_min = nc.sep_a_min;
  rec.sep_a_max = nc.sep_a_max;
  rec.sep_b_max = nc.sep_b_max;
  rec.cone_ratio_max = nc.cone_ratio_max;
  return rec;
}

std::vector<std::string> diagnostics_columns() {
  return {"time",          "convex_margin", "alpha",   "beta",      "delta_minus", "delta_plus",
          "acausal_margin", "H2_min",       "H2_max",  "diameter2", "area",        "tilt_max"};
}

std::vector<double> diagnostics_values(const DiagnosticsRecord& r) {
  return {r.time,           r.convex_margin, r.alpha,  r.beta,      r.delta_minus, r.delta_plus,
          r.acausal_margin, r.H2_min,        r.H2_max, r.diameter2, r.area,        r.tilt_max};
}

std::vector<BoundCheck> bound_checks(const DiagnosticsRecord& r, int n, double rel_tol) {
  if (!(r.delta_minus > 0.0)) throw PreconditionError("bound checks need delta_minus > 0");
  const double dm = r.delta_minus, dp = r.delta_plus;
  std::vector<BoundCheck> out;
  auto add = [&](std::string name, double lhs, double rhs) {
    const double slack = rhs - lhs;
    out.push_back({std::move(name), lhs, rhs, slack, slack >= -rel_tol * std::max(1.0, std::abs(rhs))});
  };
  add("diameter", r.diameter2, (dp + dm) * (dp + dm) / (dp * dm * dm * dm * r.H2_max));
  add("curvature_comparison", r.H2_max / r.H2_min, (dp + dm) * (dp + dm) * dp / (4.0 * dm * dm * dm));
  add("separation_normal", r.sep_a_max, (dp + dm) * (dp + dm) / (2.0 * dp * dm * dm));
  add("separation_timelike", r.sep_b_max, (dp * dp - dm * dm) / (2.0 * dp * dm * dm));
  add("separation_cone", r.cone_ratio_max, (dp - dm) / (dp + dm));
  add("separation_positive", 0.0, r.sep_a_min);
  add("delta_bracket_lower", dm, 1.0 / n);
  add("delta_bracket_upper", 1.0 / n, dp);
  return out;
}

}  // namespace lmcf
