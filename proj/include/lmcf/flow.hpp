#pragma once

#include "lmcf/diagnostics.hpp"
#include "lmcf/immersion.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmcf {

class SingularStop : public std::runtime_error {
 public:
  SingularStop(const std::string& reason, double time);
  double time;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowState {
  double t = 0.0;  // MCF time, or normalized time tau
  VertexImmersion im;
  GeometryCache geo;
  std::vector<DiagnosticsRecord> history;
  double dt_last = 0.0;
};

FlowState make_state(const VertexImmersion& im, double t = 0.0);

struct FlowOptions {
  double cfl = 0.2;
  int max_halvings = 20;
  double h2_ceiling = 1e6;
  bool record_diagnostics = false;
};

// Largest |F_{s'} - F_s|^2 bound over grid neighbours, in the companion norm of the standard frame.
double min_companion_spacing2(const VertexImmersion& im);
// sup over samples of |h|^2 in an orthonormal tangent frame, companion norm.
double sup_companion_h2(const GeometryCache& geo);
double dt_max(const FlowState& state, double cfl = 0.2);

// One classical RK4 step of dF/dt = H with exactly `dt` (halved on degenerate stages).
FlowState mcf_step(const FlowState& state, double dt, const FlowOptions& opt = {});

// Integrates to t_end with dt = min(dt_request, dt_max, remaining); `on_step` sees every
// accepted state. Raises SingularStop when the curvature ceiling is crossed.
FlowState run_mcf(FlowState state, double t_end, double dt_request, const FlowOptions& opt,
                  const std::function<void(const FlowState&)>& on_step = {});

// max |(g(t+dt) - g(t))/dt + 2 <H, h_ij>| with the right side evaluated at the earlier state.
double metric_evolution_check(const FlowState& before, const FlowState& after);
// max |LHS - RHS| of the evolution of h (normal-bundle connection), earlier-state right side.
double sff_evolution_check(const FlowState& before, const FlowState& after);

// Projected volume, its first variation G over boost slots, and the second variation Q
// (Q(Theta, Xi) = DG_Xi[Lambda_Theta F]) for the immersion as given.
struct VolumeVariation {
  double volume = 0.0;
  Vec G;
  Mat Q;
};
VolumeVariation volume_variation(const VertexImmersion& im);

// Returns the plane map B (reference P -> minimizing plane); B^{-1} aligns the immersion.
LorentzMap min_volume_plane(const VertexImmersion& im, const LorentzMap& init,
                            double tol = 1e-10, int max_iter = 10000);

struct NormalizationCoeffs {
  double a = 0.0;
  Vec b;
  Vec L;  // boost slots
  double psi = 1.0;
  LorentzMap R;
  Vec T_shift;
  double t_of_tau = 0.0;
  double q_condition = 0.0;
  bool regularized = false;
};

// a, b, L for the current geometry (plane already aligned with P).
NormalizationCoeffs normalization_coeffs(const GeometryCache& geo);

// Velocity of the normalized flow for given coefficients.
Mat normalized_velocity(const GeometryCache& geo, const NormalizationCoeffs& c);

// Reconstruction state carried along a normalized run: F_mcf = R psi F + T at t(tau).
struct ReconstructionState {
  double log_psi = 0.0;
  Mat R;
  Vec T;
  double t = 0.0;
};

// Normalization event F -> s M (F - c); the reconstruction absorbs it.
struct Reprojection {
  double tau = 0.0;
  Vec center;
  double scale = 1.0;
  Mat M;
};

// One RK4 step's stage coefficients.
struct StepRecord {
  double tau = 0.0;
  double dtau = 0.0;
  std::array<NormalizationCoeffs, 4> stages;
};

struct NormalizedOptions {
  FlowOptions flow;
  int reproject_every = 50;
};

class NormalizedFlow {
 public:
  // Performs the initial normalization of raw data.
  NormalizedFlow(const VertexImmersion& raw, const NormalizedOptions& opt = {});

  // RK4 step of the full right side; re-projects on the configured cadence.
  void step(double dtau);
  void reproject();

  const FlowState& state() const { return state_; }
  double tau() const { return state_.t; }
  const ReconstructionState& reconstruction() const { return recon_; }
  const NormalizationCoeffs& coeffs() const { return coeffs_; }
  const std::vector<StepRecord>& steps() const { return steps_; }
  const std::vector<Reprojection>& reprojections() const { return reprojections_; }
  const VertexImmersion& initial() const { return initial_; }
  // Max change of the plane map at the last re-projection (|M - I|).
  double last_plane_change() const { return last_plane_change_; }
  int step_count() const { return step_count_; }
  // Reconstructed MCF immersion R psi F + T.
  VertexImmersion reconstructed() const;
  double dt_limit() const;

 private:
  void apply_reprojection(const Reprojection& r);

  NormalizedOptions opt_;
  VertexImmersion initial_;
  FlowState state_;
  ReconstructionState recon_;
  NormalizationCoeffs coeffs_;
  std::vector<StepRecord> steps_;
  std::vector<Reprojection> reprojections_;
  double last_plane_change_ = 0.0;
  int step_count_ = 0;
  int since_reprojection_ = 0;
};

// Advances the reconstruction ODEs d ln psi = -a, R' = -R L, T' = -R psi b, t' = psi^2 over one
// recorded step (classical RK4 using the stored stage coefficients).
void advance_reconstruction(ReconstructionState& st, const StepRecord& rec, const SignatureSpace& sp);
void absorb_reprojection(ReconstructionState& st, const Reprojection& r, const SignatureSpace& sp);

// Rescaled snapshots L_j(lambda_j (Sigma_{t_j} - c_j)) with lambda_j = (T - t_j)^{-1/2}.
std::vector<VertexImmersion> rescaled_sequence(const std::vector<FlowState>& snapshots, double T_est);

// Least-squares zero crossing of V^{2/(n+1)} against t.
double estimate_extinction_time(const std::vector<double>& t, const std::vector<double>& volume, int n);

struct BlowupStatus {
  bool singular = false;
  std::string reason;
  double sup_h2 = 0.0;
  double extrapolated_time = 0.0;  // NaN until two samples exist
};

class BlowupMonitor {
 public:
  explicit BlowupMonitor(double ceiling = 1e6, double dt_floor = 1e-14)
      : ceiling_(ceiling), dt_floor_(dt_floor) {}
  BlowupStatus observe(const FlowState& state);
  const BlowupStatus& status() const { return status_; }

 private:
  double ceiling_, dt_floor_;
  std::vector<double> t_, inv_h2_;
  BlowupStatus status_;
};

}  // namespace lmcf
