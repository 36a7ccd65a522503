#include "lmcf/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lmcf {

namespace fs = std::filesystem;

namespace {

const char* const kDefaults = R"([run]
mode = mcf
output_dir = out
seed = 0

[space]
n_space = 2
n_time = 1

[fixture]
kind = circle
radius = 1
sigma = const:1
eta =
amplitude = 0.05
path =

[grid]
m = 128
m_phi = 16
m_theta = 32
scheme = spectral

[time]
dt = 0.001
t_end = 0.1
dtau = 0.001
tau_end = 1
snapshots =
cfl = 0.2
h2_ceiling = 1000000
reproject_every = 50

[diagnostics]
every = 1
monotonicity_tol = 1e-07

[normalized]
spectra_every = 0.05
fit_lo = 1e-06
fit_hi = 0.01
)";

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

ConfigMap parse_raw(const std::string& text, bool strict_keys);

const ConfigMap& defaults() {
  static const ConfigMap d = parse_raw(kDefaults, false);
  return d;
}

ConfigMap parse_raw(const std::string& text, bool strict_keys) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = section + "." + trim(t.substr(0, eq));
    if (strict_keys && !defaults().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

double to_double(const ConfigMap& m, const std::string& key) {
  const std::string& v = m.at(key);
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
  return x;
}

long long to_int(const ConfigMap& m, const std::string& key) {
  const std::string& v = m.at(key);
  size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) throw ConfigError(key + ": '" + v + "' is not an integer");
  return x;
}

std::vector<double> to_list(const ConfigMap& m, const std::string& key) {
  std::string v = m.at(key);
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    ConfigMap one{{key, tok}};
    out.push_back(to_double(one, key));
  }
  return out;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) { return parse_raw(text, true); }

ConfigMap load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(ConfigMap& map, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must be key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (!defaults().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  map[key] = trim(assignment.substr(eq + 1));
}

std::string default_config_text() { return kDefaults; }

std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::mcf: return "mcf";
    case RunMode::normalized: return "normalized";
    case RunMode::rescale_sequence: return "rescale_sequence";
    case RunMode::diagnose_only: return "diagnose_only";
  }
  return "?";
}

RunConfig build_config(const ConfigMap& given, const fs::path& base_dir) {
  ConfigMap m = defaults();
  for (const auto& [k, v] : given) {
    if (!m.count(k)) throw ConfigError("unknown configuration key '" + k + "'");
    m[k] = v;
  }
  RunConfig c;

  const std::string& mode = m["run.mode"];
  if (mode == "mcf") c.mode = RunMode::mcf;
  else if (mode == "normalized") c.mode = RunMode::normalized;
  else if (mode == "rescale_sequence") c.mode = RunMode::rescale_sequence;
  else if (mode == "diagnose_only") c.mode = RunMode::diagnose_only;
  else throw ConfigError("run.mode: unknown mode '" + mode + "'");
  if (m["run.output_dir"].empty()) throw ConfigError("run.output_dir must not be empty");
  c.output_dir = m["run.output_dir"];
  if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
  const long long seed = to_int(m, "run.seed");
  if (seed < 0) throw ConfigError("run.seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);

  c.n_space = static_cast<int>(to_int(m, "space.n_space"));
  c.n_time = static_cast<int>(to_int(m, "space.n_time"));
  if (c.n_space != 2 && c.n_space != 3) throw ConfigError("space.n_space must be 2 (curves) or 3 (surfaces)");
  if (c.n_time < 1) throw ConfigError("space.n_time must be at least 1");

  const std::string& kind = m["fixture.kind"];
  if (kind == "circle") c.fixture = FixtureKind::circle;
  else if (kind == "sphere") c.fixture = FixtureKind::sphere;
  else if (kind == "paper_gamma") c.fixture = FixtureKind::paper_gamma;
  else if (kind == "gauss") c.fixture = FixtureKind::gauss;
  else if (kind == "random_gauss") c.fixture = FixtureKind::random_gauss;
  else if (kind == "file") c.fixture = FixtureKind::file;
  else throw ConfigError("fixture.kind: unknown fixture '" + kind + "'");
  c.radius = to_double(m, "fixture.radius");
  if (!(c.radius > 0.0)) throw ConfigError("fixture.radius must be positive");
  try {
    c.sigma = parse_mode_terms(m["fixture.sigma"]);
    // One eta field per timelike direction, separated by '|'.
    std::string rest = m["fixture.eta"];
    while (!trim(rest).empty()) {
      const auto bar = rest.find('|');
      c.eta.push_back(parse_mode_terms(rest.substr(0, bar)));
      if (bar == std::string::npos) break;
      rest = rest.substr(bar + 1);
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("fixture: ") + e.what());
  }
  if (static_cast<int>(c.eta.size()) > c.n_time) throw ConfigError("fixture.eta lists more fields than space.n_time");
  c.random_amplitude = to_double(m, "fixture.amplitude");
  if (!m["fixture.path"].empty()) {
    c.fixture_path = m["fixture.path"];
    if (c.fixture_path.is_relative() && !base_dir.empty()) c.fixture_path = base_dir / c.fixture_path;
  }
  if (c.fixture == FixtureKind::paper_gamma && (c.n_space != 2 || c.n_time != 1))
    throw ConfigError("paper_gamma lives in signature (2, 1)");
  if (c.fixture == FixtureKind::file) {
    if (c.fixture_path.empty()) throw ConfigError("fixture.path is required for file fixtures");
    if (!fs::exists(c.fixture_path)) throw ConfigError("fixture file " + c.fixture_path.string() + " does not exist");
  }

  const std::string& scheme = m["grid.scheme"];
  DerivativeScheme sch;
  if (scheme == "spectral") sch = DerivativeScheme::spectral;
  else if (scheme == "fd4") sch = DerivativeScheme::fd4;
  else throw ConfigError("grid.scheme must be spectral or fd4");
  try {
    c.grid = c.n_space == 2 ? GridSpec::curve(static_cast<int>(to_int(m, "grid.m")), sch)
                            : GridSpec::sphere(static_cast<int>(to_int(m, "grid.m_phi")),
                                               static_cast<int>(to_int(m, "grid.m_theta")), sch);
    c.grid.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  c.dt = to_double(m, "time.dt");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  c.dtau = to_double(m, "time.dtau");
  if (!(c.dtau > 0.0)) throw ConfigError("dtau must be positive");
  c.t_end = to_double(m, "time.t_end");
  c.tau_end = to_double(m, "time.tau_end");
  if (!(c.t_end > 0.0) || !(c.tau_end > 0.0)) throw ConfigError("t_end and tau_end must be positive");
  c.snapshot_times = to_list(m, "time.snapshots");
  std::sort(c.snapshot_times.begin(), c.snapshot_times.end());
  for (double t : c.snapshot_times)
    if (t < 0.0) throw ConfigError("snapshot times must be non-negative");
  c.cfl = to_double(m, "time.cfl");
  if (!(c.cfl > 0.0)) throw ConfigError("time.cfl must be positive");
  c.h2_ceiling = to_double(m, "time.h2_ceiling");
  if (!(c.h2_ceiling > 0.0)) throw ConfigError("time.h2_ceiling must be positive");
  c.reproject_every = static_cast<int>(to_int(m, "time.reproject_every"));
  if (c.reproject_every < 0) throw ConfigError("time.reproject_every must be non-negative");

  c.diagnostics_every = static_cast<int>(to_int(m, "diagnostics.every"));
  if (c.diagnostics_every < 1) throw ConfigError("diagnostics.every must be at least 1");
  c.monotonicity_tol = to_double(m, "diagnostics.monotonicity_tol");
  if (!(c.monotonicity_tol >= 0.0)) throw ConfigError("diagnostics.monotonicity_tol must be non-negative");

  c.spectra_every = to_double(m, "normalized.spectra_every");
  if (!(c.spectra_every > 0.0)) throw ConfigError("normalized.spectra_every must be positive");
  c.fit_lo = to_double(m, "normalized.fit_lo");
  c.fit_hi = to_double(m, "normalized.fit_hi");
  if (!(c.fit_lo > 0.0) || !(c.fit_hi > c.fit_lo)) throw ConfigError("normalized fit window needs 0 < fit_lo < fit_hi");
  return c;
}

}  // namespace lmcf
