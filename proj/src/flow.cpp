#include "lmcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lmcf {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area(int n) { return n == 1 ? 2.0 * kPi : 4.0 * kPi; }

// Determinant of the spatial parts of n + 1 ambient vectors.
double det_spatial(int n, const double* u, const double* v, const double* w) {
  if (n == 1) return u[0] * v[1] - u[1] * v[0];
  return u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
         u[2] * (v[0] * w[1] - v[1] * w[0]);
}

std::vector<Mat> coordinate_derivatives(const GridSpec& grid, const Mat& X) {
  const Differentiator D(grid);
  if (grid.n == 1) return {D.d(X, 0)};
  return {D.d(X, 0), D.d(X, 1)};
}

// Integral of det_P(X0, X1[, X2]) over coordinates; columns are samples.
double integrate_det(const GridSpec& grid, const Vec& w, const Mat& X0, const Mat& X1,
                     const Mat* X2) {
  double sum = 0.0;
  for (int s = 0; s < grid.size(); ++s)
    sum += w(s) * det_spatial(grid.n, X0.col(s).data(), X1.col(s).data(),
                              X2 ? X2->col(s).data() : nullptr);
  return sum;
}

struct Variation {
  double volume;
  double orientation;
  Vec G;
  Mat Q;
};

Variation variation_from(const GridSpec& grid, const SignatureSpace& sp, const Mat& F,
                         const std::vector<Mat>& dF, bool with_q) {
  const int n = grid.n, nb = boost_slot_count(sp);
  const Vec w = grid.coordinate_weights();
  Variation v;
  v.volume = integrate_det(grid, w, F, dF[0], n == 2 ? &dF[1] : nullptr) / (n + 1);
  v.orientation = v.volume >= 0.0 ? 1.0 : -1.0;
  v.volume *= v.orientation;
  std::vector<Mat> LF(nb);
  std::vector<Mat> gens(nb);
  for (int i = 0; i < sp.n_space; ++i)
    for (int a = 0; a < sp.n_time; ++a) {
      const int slot = i * sp.n_time + a;
      gens[slot] = boost_generator(sp, i, a);
      LF[slot] = gens[slot] * F;
    }
  v.G = Vec(nb);
  for (int x = 0; x < nb; ++x)
    v.G(x) = v.orientation * integrate_det(grid, w, LF[x], dF[0], n == 2 ? &dF[1] : nullptr);
  if (!with_q) return v;
  v.Q = Mat(nb, nb);
  for (int th = 0; th < nb; ++th) {
    std::vector<Mat> LdF;
    for (const Mat& d : dF) LdF.push_back(gens[th] * d);
    for (int x = 0; x < nb; ++x) {
      const Mat LLF = gens[x] * LF[th];
      double q;
      if (n == 1) {
        q = integrate_det(grid, w, LLF, dF[0], nullptr) + integrate_det(grid, w, LF[x], LdF[0], nullptr);
      } else {
        q = integrate_det(grid, w, LLF, dF[0], &dF[1]) + integrate_det(grid, w, LF[x], LdF[0], &dF[1]) +
            integrate_det(grid, w, LF[x], dF[0], &LdF[1]);
      }
      v.Q(th, x) = v.orientation * q;
    }
  }
  return v;
}

Mat boost_matrix(const SignatureSpace& sp, const Vec& L) {
  return L.size() ? boost_algebra(sp, L) : Mat::Zero(sp.dim(), sp.dim());
}

}  // namespace

SingularStop::SingularStop(const std::string& reason, double t)
    : std::runtime_error(reason), time(t) {}

FlowState make_state(const VertexImmersion& im, double t) {
  FlowState st;
  st.t = t;
  st.im = im;
  st.geo = compute_geometry(im);
  return st;
}

double min_companion_spacing2(const VertexImmersion& im) {
  const GridSpec& g = im.grid;
  const Mat& F = im.positions;
  double best = std::numeric_limits<double>::infinity();
  if (g.n == 1) {
    for (int s = 0; s < g.m; ++s) best = std::min(best, (F.col((s + 1) % g.m) - F.col(s)).squaredNorm());
    return best;
  }
  for (int i = 0; i < g.m_phi; ++i)
    for (int j = 0; j < g.m_theta; ++j) {
      const int s = i * g.m_theta + j;
      best = std::min(best, (F.col(i * g.m_theta + (j + 1) % g.m_theta) - F.col(s)).squaredNorm());
      if (i + 1 < g.m_phi) best = std::min(best, (F.col(s + g.m_theta) - F.col(s)).squaredNorm());
    }
  return best;
}

double sup_companion_h2(const GeometryCache& geo) {
  const int n = geo.n();
  double best = 0.0;
  for (int s = 0; s < geo.samples(); ++s) {
    const Mat E = geo.orthonormal_tangent_coords(s);
    double sum = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Vec v = Vec::Zero(geo.space.dim());
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v += E(i, a) * E(j, b) * geo.h[sym_index(i, j)].col(s);
        sum += v.squaredNorm();
      }
    best = std::max(best, sum);
  }
  return best;
}

double dt_max(const FlowState& state, double cfl) {
  return cfl * min_companion_spacing2(state.im) / (1.0 + sup_companion_h2(state.geo));
}

FlowState mcf_step(const FlowState& state, double dt, const FlowOptions& opt) {
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
  double h = dt;
  for (int attempt = 0; attempt <= opt.max_halvings; ++attempt, h *= 0.5) {
    try {
      const Mat& F = state.im.positions;
      const Mat& k1 = state.geo.H;
      VertexImmersion tmp = state.im;
      tmp.positions = F + 0.5 * h * k1;
      const Mat k2 = compute_geometry(tmp).H;
      tmp.positions = F + 0.5 * h * k2;
      const Mat k3 = compute_geometry(tmp).H;
      tmp.positions = F + h * k3;
      const Mat k4 = compute_geometry(tmp).H;
      tmp.positions = F + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      spectral_filter(tmp.grid, tmp.positions);
      FlowState out;
      out.t = state.t + h;
      out.im = std::move(tmp);
      out.geo = compute_geometry(out.im);
      out.dt_last = h;
      out.history = state.history;
      if (opt.record_diagnostics) out.history.push_back(diagnose(out.im, out.geo, out.t));
      return out;
    } catch (const DegenerateMetricError&) {
    }
  }
  throw SingularStop("degenerate metric persists after " + std::to_string(opt.max_halvings) +
                         " step halvings",
                     state.t);
}

FlowState run_mcf(FlowState state, double t_end, double dt_request, const FlowOptions& opt,
                  const std::function<void(const FlowState&)>& on_step) {
  if (!(dt_request > 0.0)) throw ArgumentError("dt must be positive");
  while (t_end - state.t > 1e-14 * std::max(1.0, t_end)) {
    const double dt = std::min({dt_request, dt_max(state, opt.cfl), t_end - state.t});
    state = mcf_step(state, dt, opt);
    const double h2 = sup_companion_h2(state.geo);
    if (h2 > opt.h2_ceiling) throw SingularStop("curvature ceiling exceeded", state.t);
    if (on_step) on_step(state);
  }
  return state;
}

double metric_evolution_check(const FlowState& before, const FlowState& after) {
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw ArgumentError("states must be consecutive in time");
  const GeometryCache& b = before.geo;
  const GeometryCache& a = after.geo;
  double r = 0.0;
  for (int ij = 0; ij < sym_count(b.n()); ++ij)
    for (int s = 0; s < b.samples(); ++s) {
      const double lhs = (a.g[ij](s) - b.g[ij](s)) / dt;
      const double rhs = -2.0 * inner(b.space, b.H.col(s), b.h[ij].col(s));
      r = std::max(r, std::abs(lhs - rhs));
    }
  return r;
}

double sff_evolution_check(const FlowState& before, const FlowState& after) {
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw ArgumentError("states must be consecutive in time");
  const GeometryCache& b = before.geo;
  const GeometryCache& a = after.geo;
  const int n = b.n(), nsym = sym_count(n);
  const Differentiator D(b.grid);
  std::vector<Mat> dH = coordinate_derivatives(b.grid, b.H);
  std::vector<Mat> ddH;
  if (n == 1) ddH = {D.dd(b.H, 0)};
  else ddH = {D.dd(b.H, 0), D.dmixed(b.H), D.dd(b.H, 1)};
  double r = 0.0;
  for (int s = 0; s < b.samples(); ++s) {
    // <H, h_ip> g^{pq} h_qj as a function of (i, j).
    auto quad = [&](int i, int j) {
      Vec out = Vec::Zero(b.space.dim());
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          out += inner(b.space, b.H.col(s), b.h[sym_index(i, p)].col(s)) * b.ginv[sym_index(p, q)](s) *
                 b.h[sym_index(q, j)].col(s);
      return out;
    };
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const int ij = sym_index(i, j);
        Vec hess = b.normal_part(s, ddH[ij].col(s)) + quad(j, i);
        for (int k = 0; k < n; ++k)
          hess -= b.christoffel[k * nsym + ij](s) * b.normal_part(s, dH[k].col(s));
        const Vec lhs = b.normal_part(s, (a.h[ij].col(s) - b.h[ij].col(s)) / dt) + quad(i, j) + quad(j, i);
        const Vec rhs = hess + quad(i, j);
        r = std::max(r, (lhs - rhs).norm());
      }
  }
  return r;
}

VolumeVariation volume_variation(const VertexImmersion& im) {
  const Variation v = variation_from(im.grid, im.space, im.positions,
                                     coordinate_derivatives(im.grid, im.positions), true);
  return {v.volume, v.G, v.Q};
}

LorentzMap min_volume_plane(const VertexImmersion& im, const LorentzMap& init, double tol,
                            int max_iter) {
  const SignatureSpace& sp = im.space;
  const int nb = boost_slot_count(sp);
  if (nb == 0) return LorentzMap::identity(sp);
  const std::vector<Mat> dF0 = coordinate_derivatives(im.grid, im.positions);
  Mat M = inverse(sp, init).matrix;
  auto evaluate = [&](const Mat& Mm, bool q) {
    std::vector<Mat> dF;
    for (const Mat& d : dF0) dF.push_back(Mm * d);
    return variation_from(im.grid, sp, Mm * im.positions, dF, q);
  };
  Variation v = evaluate(M, true);
  const double scale = std::max(1.0, v.volume);
  for (int it = 0; it < max_iter; ++it) {
    if (v.G.norm() < tol * scale) return {inverse(sp, {M, LorentzMap::Kind::composite}).matrix,
                                          LorentzMap::Kind::composite};
    const Mat Qs = 0.5 * (v.Q + v.Q.transpose());
    Eigen::LLT<Mat> llt(Qs);
    Vec step;
    if (llt.info() == Eigen::Success) step = -llt.solve(v.G);
    else step = -v.G / std::max(1.0, Qs.norm());
    const double slope = v.G.dot(step);
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      const Mat Mt = boost_exp(sp, step, t).matrix * M;
      const Variation vt = evaluate(Mt, true);
      if (vt.volume <= v.volume + 1e-4 * t * slope || vt.G.norm() < v.G.norm() * (1.0 - 1e-4 * t)) {
        M = Mt;
        v = vt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Volume is flat to round-off; accept when the gradient is near the floor.
      if (v.G.norm() < 1e3 * tol * scale)
        return {inverse(sp, {M, LorentzMap::Kind::composite}).matrix, LorentzMap::Kind::composite};
      throw OptimizationError("projected-volume descent stalled with gradient norm " +
                              std::to_string(v.G.norm()));
    }
  }
  throw OptimizationError("projected-volume descent did not converge in " + std::to_string(max_iter) +
                          " iterations (gradient norm " + std::to_string(v.G.norm()) + ")");
}

NormalizationCoeffs normalization_coeffs(const GeometryCache& geo) {
  const SignatureSpace& sp = geo.space;
  const GridSpec& grid = geo.grid;
  const int n = grid.n, nb = boost_slot_count(sp);
  NormalizationCoeffs c;
  const double A = geo.area;
  c.a = geo.H2.dot(geo.dmu) / (A * n);
  const Vec Fbar = geo.F * geo.dmu / A;
  const Vec HF = geo.F * geo.H2.cwiseProduct(geo.dmu) / A;
  c.L = Vec::Zero(nb);
  if (nb > 0) {
    const Variation v = variation_from(grid, sp, geo.F, geo.dF, true);
    const Vec w = grid.coordinate_weights();
    const std::vector<Mat> dH = coordinate_derivatives(grid, geo.H);
    Vec B(nb);
    for (int i = 0; i < sp.n_space; ++i)
      for (int al = 0; al < sp.n_time; ++al) {
        const int x = i * sp.n_time + al;
        const Mat Lx = boost_generator(sp, i, al);
        const Mat LF = Lx * geo.F;
        double dg;
        if (n == 1) {
          dg = integrate_det(grid, w, Lx * geo.H, geo.dF[0], nullptr) +
               integrate_det(grid, w, LF, dH[0], nullptr);
        } else {
          dg = integrate_det(grid, w, Lx * geo.H, geo.dF[0], &geo.dF[1]) +
               integrate_det(grid, w, LF, dH[0], &geo.dF[1]) + integrate_det(grid, w, LF, geo.dF[0], &dH[1]);
        }
        B(x) = v.orientation * dg + (n + 1) * c.a * v.G(x);
      }
    Eigen::JacobiSVD<Mat> svd(v.Q);
    const Vec sv = svd.singularValues();
    c.q_condition = sv(0) / std::max(sv(sv.size() - 1), std::numeric_limits<double>::min());
    Mat Qt = v.Q.transpose();
    if (c.q_condition > 1e12) {
      c.regularized = true;
      Qt += 1e-12 * std::max(1.0, sv(0)) * Mat::Identity(nb, nb);
    }
    c.L = Qt.fullPivLu().solve(-B);
  }
  c.b = HF - ((n + 1) * c.a * Fbar + boost_matrix(sp, c.L) * Fbar);
  c.R = LorentzMap::identity(sp);
  c.T_shift = Vec::Zero(sp.dim());
  return c;
}

Mat normalized_velocity(const GeometryCache& geo, const NormalizationCoeffs& c) {
  Mat V = geo.H + c.a * geo.F + boost_matrix(geo.space, c.L) * geo.F;
  V.colwise() += c.b;
  return V;
}

void advance_reconstruction(ReconstructionState& st, const StepRecord& rec, const SignatureSpace& sp) {
  struct Y {
    double lp;
    Mat R;
    Vec T;
    double t;
  };
  auto f = [&](const Y& y, const NormalizationCoeffs& c) {
    const double psi = std::exp(y.lp);
    return Y{-c.a, -y.R * boost_matrix(sp, c.L), -y.R * (psi * c.b), psi * psi};
  };
  auto axpy = [](const Y& y, double h, const Y& k) {
    return Y{y.lp + h * k.lp, y.R + h * k.R, y.T + h * k.T, y.t + h * k.t};
  };
  const double h = rec.dtau;
  const Y y0{st.log_psi, st.R, st.T, st.t};
  const Y k1 = f(y0, rec.stages[0]);
  const Y k2 = f(axpy(y0, 0.5 * h, k1), rec.stages[1]);
  const Y k3 = f(axpy(y0, 0.5 * h, k2), rec.stages[2]);
  const Y k4 = f(axpy(y0, h, k3), rec.stages[3]);
  st.log_psi += h / 6.0 * (k1.lp + 2.0 * k2.lp + 2.0 * k3.lp + k4.lp);
  st.R += h / 6.0 * (k1.R + 2.0 * k2.R + 2.0 * k3.R + k4.R);
  st.T += h / 6.0 * (k1.T + 2.0 * k2.T + 2.0 * k3.T + k4.T);
  st.t += h / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t);
}

void absorb_reprojection(ReconstructionState& st, const Reprojection& r, const SignatureSpace& sp) {
  st.T += st.R * (std::exp(st.log_psi) * r.center);
  st.R = st.R * inverse(sp, {r.M, LorentzMap::Kind::composite}).matrix;
  st.log_psi -= std::log(r.scale);
}

NormalizedFlow::NormalizedFlow(const VertexImmersion& raw, const NormalizedOptions& opt)
    : opt_(opt), initial_(raw) {
  state_ = make_state(raw, 0.0);
  const int d = raw.space.dim();
  recon_ = {0.0, Mat::Identity(d, d), Vec::Zero(d), 0.0};
  reproject();
}

void NormalizedFlow::apply_reprojection(const Reprojection& r) {
  VertexImmersion im = state_.im;
  im.positions.colwise() -= r.center;
  im.positions = r.scale * (r.M * im.positions);
  const double tau = state_.t;
  state_ = make_state(im, tau);
  absorb_reprojection(recon_, r, im.space);
  reprojections_.push_back(r);
  coeffs_ = normalization_coeffs(state_.geo);
  coeffs_.psi = std::exp(recon_.log_psi);
  coeffs_.R = {recon_.R, LorentzMap::Kind::composite};
  coeffs_.T_shift = recon_.T;
  coeffs_.t_of_tau = recon_.t;
  since_reprojection_ = 0;
}

void NormalizedFlow::reproject() {
  const SignatureSpace& sp = state_.im.space;
  Reprojection r;
  r.tau = state_.t;
  r.center = center_of_mass(state_.geo);
  r.scale = std::pow(sphere_area(state_.im.grid.n) / state_.geo.area, 1.0 / state_.im.grid.n);
  VertexImmersion tmp = state_.im;
  tmp.positions.colwise() -= r.center;
  tmp.positions *= r.scale;
  const LorentzMap B = min_volume_plane(tmp, LorentzMap::identity(sp));
  r.M = inverse(sp, B).matrix;
  last_plane_change_ = (r.M - Mat::Identity(sp.dim(), sp.dim())).cwiseAbs().maxCoeff();
  apply_reprojection(r);
}

void NormalizedFlow::step(double dtau) {
  if (!(dtau > 0.0)) throw ArgumentError("dtau must be positive");
  double h = dtau;
  for (int attempt = 0; attempt <= opt_.flow.max_halvings; ++attempt, h *= 0.5) {
    try {
      StepRecord rec;
      rec.tau = state_.t;
      rec.dtau = h;
      const Mat& F = state_.im.positions;
      rec.stages[0] = coeffs_;
      const Mat k1 = normalized_velocity(state_.geo, rec.stages[0]);
      VertexImmersion tmp = state_.im;
      tmp.positions = F + 0.5 * h * k1;
      GeometryCache g = compute_geometry(tmp);
      rec.stages[1] = normalization_coeffs(g);
      const Mat k2 = normalized_velocity(g, rec.stages[1]);
      tmp.positions = F + 0.5 * h * k2;
      g = compute_geometry(tmp);
      rec.stages[2] = normalization_coeffs(g);
      const Mat k3 = normalized_velocity(g, rec.stages[2]);
      tmp.positions = F + h * k3;
      g = compute_geometry(tmp);
      rec.stages[3] = normalization_coeffs(g);
      const Mat k4 = normalized_velocity(g, rec.stages[3]);
      tmp.positions = F + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      spectral_filter(tmp.grid, tmp.positions);
      FlowState next = make_state(tmp, state_.t + h);
      next.dt_last = h;
      state_ = std::move(next);
      advance_reconstruction(recon_, rec, tmp.space);
      steps_.push_back(rec);
      ++step_count_;
      if (++since_reprojection_ >= opt_.reproject_every && opt_.reproject_every > 0) {
        reproject();
      } else {
        coeffs_ = normalization_coeffs(state_.geo);
        coeffs_.psi = std::exp(recon_.log_psi);
        coeffs_.R = {recon_.R, LorentzMap::Kind::composite};
        coeffs_.T_shift = recon_.T;
        coeffs_.t_of_tau = recon_.t;
      }
      if (sup_companion_h2(state_.geo) > opt_.flow.h2_ceiling)
        throw SingularStop("curvature ceiling exceeded in normalized flow", state_.t);
      return;
    } catch (const DegenerateMetricError&) {
    }
  }
  throw SingularStop("degenerate metric persists after step halvings", state_.t);
}

VertexImmersion NormalizedFlow::reconstructed() const {
  VertexImmersion im = state_.im;
  im.positions = std::exp(recon_.log_psi) * (recon_.R * state_.im.positions);
  im.positions.colwise() += recon_.T;
  return im;
}

double NormalizedFlow::dt_limit() const { return dt_max(state_, opt_.flow.cfl); }

std::vector<VertexImmersion> rescaled_sequence(const std::vector<FlowState>& snapshots, double T_est) {
  std::vector<VertexImmersion> out;
  double prev = -std::numeric_limits<double>::infinity();
  for (const FlowState& st : snapshots) {
    if (!(st.t > prev)) throw ArgumentError("snapshot times must be strictly increasing");
    if (!(st.t < T_est)) throw ArgumentError("snapshot time is not before the extinction estimate");
    prev = st.t;
    const double lambda = 1.0 / std::sqrt(T_est - st.t);
    VertexImmersion im = st.im;
    im.positions.colwise() -= center_of_mass(st.geo);
    im.positions *= lambda;
    const LorentzMap B = min_volume_plane(im, LorentzMap::identity(im.space));
    im.positions = inverse(im.space, B).matrix * im.positions;
    out.push_back(std::move(im));
  }
  return out;
}

double estimate_extinction_time(const std::vector<double>& t, const std::vector<double>& volume, int n) {
  if (t.size() != volume.size() || t.size() < 2)
    throw ArgumentError("extinction fit needs at least two (t, volume) samples");
  const double p = 2.0 / (n + 1);
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double m = static_cast<double>(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    if (!(volume[i] > 0.0)) throw ArgumentError("volume samples must be positive");
    const double y = std::pow(volume[i], p);
    st += t[i], sy += y, stt += t[i] * t[i], sty += t[i] * y;
  }
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  const double icpt = (sy - slope * st) / m;
  if (!(slope < 0.0)) throw ArgumentError("volume is not decreasing; no extinction estimate");
  return -icpt / slope;
}

BlowupStatus BlowupMonitor::observe(const FlowState& state) {
  status_.sup_h2 = sup_companion_h2(state.geo);
  const double y = 1.0 / status_.sup_h2;
  // Keep samples spaced by 1% in 1/sup|h|^2 so the fit window does not shrink with dt.
  if (inv_h2_.empty() || std::abs(y - inv_h2_.back()) > 0.01 * std::abs(inv_h2_.back())) {
    t_.push_back(state.t);
    inv_h2_.push_back(y);
    if (t_.size() > 32) {
      t_.erase(t_.begin());
      inv_h2_.erase(inv_h2_.begin());
    }
  }
  std::vector<double> ts = t_, ys = inv_h2_;
  if (ts.back() != state.t) ts.push_back(state.t), ys.push_back(y);
  status_.extrapolated_time = std::numeric_limits<double>::quiet_NaN();
  if (ts.size() >= 2) {
    const double m = static_cast<double>(ts.size());
    double tbar = 0, ybar = 0;
    for (size_t i = 0; i < ts.size(); ++i) tbar += ts[i] / m, ybar += ys[i] / m;
    double stt = 0, sty = 0;
    for (size_t i = 0; i < ts.size(); ++i) stt += (ts[i] - tbar) * (ts[i] - tbar), sty += (ts[i] - tbar) * (ys[i] - ybar);
    if (stt > 0.0) {
      const double slope = sty / stt;
      if (slope < 0.0) status_.extrapolated_time = tbar - ybar / slope;
    }
  }
  if (status_.sup_h2 > ceiling_) {
    status_.singular = true;
    status_.reason = "curvature ceiling exceeded";
  } else if (state.dt_last > 0.0 && state.dt_last < dt_floor_) {
    status_.singular = true;
    status_.reason = "time step underflow";
  }
  return status_;
}

}  // namespace lmcf
