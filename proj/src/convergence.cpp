#include "lmcf/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lmcf {

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficients of one scalar field by degree.
std::vector<Vec> transform(const GridSpec& grid, const Vec& f, int L) {
  std::vector<Vec> out(L + 1);
  if (grid.n == 1) {
    const int M = grid.m;
    out[0] = Vec::Constant(1, f.mean());
    for (int g = 1; g <= L; ++g) {
      double c = 0.0, s = 0.0;
      for (int j = 0; j < M; ++j) {
        const double th = grid.theta(j);
        c += f(j) * std::cos(g * th);
        s += f(j) * std::sin(g * th);
      }
      out[g] = Vec(2);
      out[g] << 2.0 * c / M, 2.0 * s / M;
    }
    return out;
  }
  const Vec w = grid.round_weights();
  for (int g = 0; g <= L; ++g) {
    out[g] = Vec::Zero(2 * g + 1);
    for (int m = -g; m <= g; ++m) {
      double acc = 0.0;
      for (int s = 0; s < grid.size(); ++s)
        acc += w(s) * f(s) * real_spherical_harmonic(g, m, grid.phi(s), grid.theta(s));
      out[g](m + g) = acc;
    }
  }
  return out;
}

Vec inverse_transform(const GridSpec& grid, const std::vector<Vec>& c) {
  Vec f = Vec::Zero(grid.size());
  const int L = static_cast<int>(c.size()) - 1;
  for (int s = 0; s < grid.size(); ++s) {
    double v = 0.0;
    if (grid.n == 1) {
      const double th = grid.theta(s);
      v = c[0](0);
      for (int g = 1; g <= L; ++g) v += c[g](0) * std::cos(g * th) + c[g](1) * std::sin(g * th);
    } else {
      for (int g = 0; g <= L; ++g)
        for (int m = -g; m <= g; ++m)
          v += c[g](m + g) * real_spherical_harmonic(g, m, grid.phi(s), grid.theta(s));
    }
    f(s) = v;
  }
  return f;
}

double degree_norm_of(int n, int gamma, const Vec& c) {
  if (n == 2) return c.norm();
  return gamma == 0 ? std::sqrt(2.0 * kPi) * std::abs(c(0)) : std::sqrt(kPi) * c.norm();
}

double field_norm(int n, const std::vector<Vec>& modes) {
  double sum = 0.0;
  for (size_t g = 0; g < modes.size(); ++g) sum += std::pow(degree_norm_of(n, static_cast<int>(g), modes[g]), 2);
  return std::sqrt(sum);
}

double lambda(int n, int gamma) { return gamma * (n + gamma - 1.0); }

}  // namespace

double ModeSpectrum::degree_norm(ModeField field, int gamma, int alpha) const {
  if (gamma < 0 || gamma > degree_max) throw ArgumentError("degree outside the spectrum");
  if (field == ModeField::sigma) return degree_norm_of(n, gamma, sigma_modes[gamma]);
  if (alpha < 0 || alpha >= static_cast<int>(eta_modes.size())) throw ArgumentError("eta index out of range");
  return degree_norm_of(n, gamma, eta_modes[alpha][gamma]);
}

int truncation_degree(const GridSpec& grid, int requested) {
  grid.validate();
  if (grid.n == 1) return std::min(requested, (grid.m - 1) / 2);
  return std::max(0, std::min({requested, (grid.m_phi - 1) / 2, grid.m_theta / 2 - 1}));
}

ModeSpectrum decompose(const GaussImmersion& gim, int degree) {
  ModeSpectrum sp;
  sp.n = gim.grid.n;
  // Curves keep every resolved Fourier mode; the cap only applies to the sphere transform.
  sp.degree_max = sp.n == 1 ? truncation_degree(gim.grid, gim.grid.m) : truncation_degree(gim.grid, degree);
  sp.sigma_modes = transform(gim.grid, gim.sigma.array() - 1.0, sp.degree_max);
  sp.l2_sigma = field_norm(sp.n, sp.sigma_modes);
  for (int a = 0; a < gim.eta.rows(); ++a) {
    sp.eta_modes.push_back(transform(gim.grid, gim.eta.row(a).transpose(), sp.degree_max));
    sp.l2_eta += field_norm(sp.n, sp.eta_modes.back());
  }
  return sp;
}

std::pair<Vec, Mat> synthesize(const ModeSpectrum& spec, const GridSpec& grid) {
  if (grid.n != spec.n) throw ArgumentError("spectrum and grid dimensions differ");
  Vec sigma = inverse_transform(grid, spec.sigma_modes).array() + 1.0;
  Mat eta(spec.eta_modes.size(), grid.size());
  for (size_t a = 0; a < spec.eta_modes.size(); ++a)
    eta.row(a) = inverse_transform(grid, spec.eta_modes[a]).transpose();
  return {sigma, eta};
}

ModeSpectrum spectrum_of(const VertexImmersion& im, int degree) {
  return decompose(to_gauss(im, LorentzMap::identity(im.space)), degree);
}

double linearized_mode_rate(int n, int gamma, ModeField field) {
  if (gamma < 0) throw ArgumentError("mode degree must be non-negative");
  return field == ModeField::sigma ? 4.0 * n - 3.0 * lambda(n, gamma) : n - lambda(n, gamma);
}

double exact_linear_rate(int n, int gamma, ModeField field) {
  if (gamma < 0) throw ArgumentError("mode degree must be non-negative");
  return field == ModeField::sigma ? 2.0 * n - lambda(n, gamma) : n - lambda(n, gamma);
}

DecayFit fit_decay(const std::vector<double>& tau, const std::vector<double>& values,
                   std::pair<double, double> window) {
  if (tau.size() != values.size()) throw FitError("tau and value series differ in length");
  std::vector<double> x, y;
  for (size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < window.first || tau[i] > window.second) continue;
    if (!(values[i] > 0.0)) throw FitError("non-positive value in the fit window");
    x.push_back(tau[i]);
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 2) throw FitError("fewer than two samples in the fit window");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) throw FitError("degenerate fit window");
  DecayFit fit;
  fit.window = window;
  fit.rate = (m * sxy - sx * sy) / den;
  const double icpt = (sy - fit.rate * sx) / m;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    ss_res += std::pow(y[i] - icpt - fit.rate * x[i], 2);
    ss_tot += std::pow(y[i] - sy / m, 2);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

void fit_mode_rates(DecayFit& fit, const std::vector<double>& tau,
                    const std::map<int, std::vector<double>>& modes) {
  for (const auto& [gamma, series] : modes) fit.per_mode_rates[gamma] = fit_decay(tau, series, fit.window).rate;
}

std::pair<double, double> select_linear_window(const std::vector<double>& tau,
                                               const std::vector<double>& norms, double lo, double hi,
                                               double flatness) {
  const size_t N = tau.size();
  if (N != norms.size() || N < 3) throw FitError("window selection needs at least three samples");
  std::vector<char> ok(N, 0);
  for (size_t i = 0; i < N; ++i) ok[i] = norms[i] >= lo && norms[i] <= hi;
  // Interior points must also be locally straight in log space.
  for (size_t i = 1; i + 1 < N; ++i) {
    if (!ok[i] || !(norms[i - 1] > 0.0) || !(norms[i + 1] > 0.0)) continue;
    const double h0 = tau[i] - tau[i - 1], h1 = tau[i + 1] - tau[i];
    const double s0 = (std::log(norms[i]) - std::log(norms[i - 1])) / h0;
    const double s1 = (std::log(norms[i + 1]) - std::log(norms[i])) / h1;
    if (std::abs(s1 - s0) > flatness * std::max(std::abs(s0), std::abs(s1))) ok[i] = 0;
  }
  size_t best_a = 0, best_b = 0;
  double best_len = -1.0;
  for (size_t i = 0; i < N;) {
    if (!ok[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < N && ok[j + 1]) ++j;
    if (j > i && tau[j] - tau[i] > best_len) {
      best_len = tau[j] - tau[i];
      best_a = i;
      best_b = j;
    }
    i = j + 1;
  }
  if (best_len <= 0.0) throw FitError("no linear window with the norm inside [lo, hi]");
  return {tau[best_a], tau[best_b]};
}

ReconstructionHistory reconstruct_mcf(const std::vector<StepRecord>& steps,
                                      const std::vector<Reprojection>& events,
                                      const SignatureSpace& space) {
  const int d = space.dim();
  ReconstructionState st{0.0, Mat::Identity(d, d), Vec::Zero(d), 0.0};
  ReconstructionHistory out;
  size_t ev = 0;
  auto record = [&](double tau) {
    out.tau.push_back(tau);
    out.t.push_back(st.t);
    out.psi.push_back(std::exp(st.log_psi));
    out.R.push_back(st.R);
    out.T.push_back(st.T);
  };
  auto absorb_until = [&](double tau) {
    while (ev < events.size() && events[ev].tau <= tau) absorb_reprojection(st, events[ev++], space);
  };
  absorb_until(steps.empty() ? 0.0 : steps.front().tau);
  record(steps.empty() ? 0.0 : steps.front().tau);
  for (const StepRecord& rec : steps) {
    absorb_until(rec.tau);
    const double t_prev = st.t;
    advance_reconstruction(st, rec, space);
    if (!(st.t > t_prev) || !std::isfinite(st.t))
      throw ReconstructionError("t(tau) is not increasing at tau = " + std::to_string(rec.tau));
    absorb_until(rec.tau + rec.dtau);
    record(rec.tau + rec.dtau);
  }
  return out;
}

double mcf_residual(const VertexImmersion& a, double t_a, const VertexImmersion& b, double t_b) {
  if (!(a.grid == b.grid)) throw ArgumentError("residual needs immersions on the same grid");
  if (!(t_b > t_a)) throw ArgumentError("residual needs t_b > t_a");
  const Mat Ha = compute_geometry(a).H;
  const Mat Hb = compute_geometry(b).H;
  return ((b.positions - a.positions) / (t_b - t_a) - 0.5 * (Ha + Hb)).cwiseAbs().maxCoeff();
}

}  // namespace lmcf
