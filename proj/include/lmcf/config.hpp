#pragma once

#include "lmcf/fixtures.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmcf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { mcf, normalized, rescale_sequence, diagnose_only };
enum class FixtureKind { circle, sphere, paper_gamma, gauss, random_gauss, file };

// Flat `[section]` / `key = value` text; keys are addressed as "section.key".
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::filesystem::path& path);
// "section.key=value"; the key must already be known.
void apply_override(ConfigMap& map, const std::string& assignment);

struct RunConfig {
  RunMode mode = RunMode::mcf;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  int n_space = 2;
  int n_time = 1;

  FixtureKind fixture = FixtureKind::circle;
  double radius = 1.0;
  std::vector<ModeTerm> sigma;
  std::vector<std::vector<ModeTerm>> eta;
  double random_amplitude = 0.05;
  std::filesystem::path fixture_path;

  GridSpec grid = GridSpec::curve(128);

  double dt = 1e-3;
  double t_end = 0.1;
  double dtau = 1e-3;
  double tau_end = 1.0;
  std::vector<double> snapshot_times;
  double cfl = 0.2;
  double h2_ceiling = 1e6;
  int reproject_every = 50;

  int diagnostics_every = 1;
  double monotonicity_tol = 1e-7;

  double spectra_every = 0.05;
  double fit_lo = 1e-6;
  double fit_hi = 1e-2;
};

// Every accepted key with its default, in file order.
std::string default_config_text();

// Validates and converts; missing keys take the defaults above. Relative paths resolve
// against `base_dir`.
RunConfig build_config(const ConfigMap& map, const std::filesystem::path& base_dir = {});

std::string mode_name(RunMode m);

}  // namespace lmcf
