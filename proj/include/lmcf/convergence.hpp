#pragma once

#include "lmcf/flow.hpp"
#include "lmcf/immersion.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lmcf {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModeField { sigma, eta };

// Coefficients of sigma - 1 and eta^alpha by degree gamma.
//
// n = 1: per degree the pair (cos, sin) amplitudes, so 0.1 cos(2 theta) has coefficient 0.1;
//        degree 0 holds the mean only.
// n = 2: per degree the 2 gamma + 1 orthonormal real Y_{gamma, m} coefficients, m = -gamma..gamma.
struct ModeSpectrum {
  int n = 1;
  int degree_max = 0;
  std::vector<Vec> sigma_modes;               // [gamma]
  std::vector<std::vector<Vec>> eta_modes;    // [alpha][gamma]
  double l2_sigma = 0.0;                      // L2 norms on the round sphere, from coefficients
  double l2_eta = 0.0;                        // sum over alpha of the per-field L2 norms

  // L2 norm of the degree-gamma component of a field on the round sphere.
  double degree_norm(ModeField field, int gamma, int alpha = 0) const;
};

// Largest degree the grid resolves exactly: Fourier modes below Nyquist for curves,
// min(16, (m_phi - 1) / 2, m_theta / 2 - 1) on the sphere grid.
int truncation_degree(const GridSpec& grid, int requested = 16);

ModeSpectrum decompose(const GaussImmersion& gim, int degree = 16);
// Inverse transform onto a grid: returns sigma (1 + modes) and eta (k x S).
std::pair<Vec, Mat> synthesize(const ModeSpectrum& spec, const GridSpec& grid);

// Spectrum of a vertex immersion read in the reference plane.
ModeSpectrum spectrum_of(const VertexImmersion& im, int degree = 16);

// Linearized coefficient from the stability inequality, lambda = gamma (n + gamma - 1):
// 4n - 3 lambda for sigma, n - lambda for eta.
double linearized_mode_rate(int n, int gamma, ModeField field);

// Decay rate of the linearized normalized flow itself: 2n - lambda for sigma, n - lambda for eta.
double exact_linear_rate(int n, int gamma, ModeField field);

struct DecayFit {
  std::pair<double, double> window{0.0, 0.0};
  double rate = 0.0;
  double r2 = 0.0;
  std::map<int, double> per_mode_rates;
};

// Least-squares slope of log(value) against tau over samples inside the window.
DecayFit fit_decay(const std::vector<double>& tau, const std::vector<double>& values,
                   std::pair<double, double> window);

// Adds per-degree slopes to `fit` using the same window. `modes[gamma]` is a series of norms.
void fit_mode_rates(DecayFit& fit, const std::vector<double>& tau,
                    const std::map<int, std::vector<double>>& modes);

// Largest tau interval where the total norm lies in [lo, hi] and the log-norm is straight:
// second differences below `flatness` times the local slope (scaled by the sample spacing).
std::pair<double, double> select_linear_window(const std::vector<double>& tau,
                                               const std::vector<double>& norms, double lo = 1e-6,
                                               double hi = 1e-2, double flatness = 0.05);

struct ReconstructionHistory {
  std::vector<double> tau, t, psi;
  std::vector<Mat> R;
  std::vector<Vec> T;
};

// Replays the reconstruction ODEs over the stored stage coefficients, absorbing every
// re-projection event at its tau. Throws ReconstructionError if t(tau) stops increasing.
ReconstructionHistory reconstruct_mcf(const std::vector<StepRecord>& steps,
                                      const std::vector<Reprojection>& events,
                                      const SignatureSpace& space);

// sup |(b - a)/(t_b - t_a) - (H_a + H_b)/2| between two samples of the same labelled flow.
double mcf_residual(const VertexImmersion& a, double t_a, const VertexImmersion& b, double t_b);

}  // namespace lmcf
