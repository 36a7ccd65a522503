#include "lmcf/runner.hpp"

#include "lmcf/convergence.hpp"
#include "lmcf/diagnostics.hpp"
#include "lmcf/flow.hpp"
#include "lmcf/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

namespace lmcf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class RunLog {
 public:
  void add(json j) { lines_.push_back(j.dump()); }
  void write(const fs::path& path) const {
    std::string out;
    for (const auto& l : lines_) out += l + '\n';
    atomic_write(path, out);
  }

 private:
  std::vector<std::string> lines_;
};

// Monotonicity and positivity of the preserved quantities between consecutive records.
class InvariantMonitor {
 public:
  InvariantMonitor(int n, double tol) : n_(n), tol_(tol) {}

  int check(const DiagnosticsRecord& rec, RunLog& log) {
    int bad = 0;
    auto flag = [&](const std::string& what, double lhs, double rhs) {
      ++bad;
      log.add({{"event", "violation"}, {"time", rec.time}, {"quantity", what}, {"value", lhs}, {"bound", rhs}});
    };
    if (!(rec.convex_margin > 0.0)) flag("convex_margin", rec.convex_margin, 0.0);
    if (!(rec.acausal_margin > 0.0)) flag("acausal_margin", rec.acausal_margin, 0.0);
    if (prev_) {
      const DiagnosticsRecord& p = *prev_;
      if (std::isfinite(rec.alpha) && std::isfinite(p.alpha) && rec.alpha < p.alpha - tol_)
        flag("alpha_decreased", rec.alpha, p.alpha);
      if (std::isfinite(rec.beta) && std::isfinite(p.beta) && rec.beta > p.beta + tol_)
        flag("beta_increased", rec.beta, p.beta);
      if (rec.delta_minus < p.delta_minus - tol_) flag("delta_minus_decreased", rec.delta_minus, p.delta_minus);
      if (rec.delta_plus > p.delta_plus + tol_) flag("delta_plus_increased", rec.delta_plus, p.delta_plus);
    }
    for (const BoundCheck& b : bound_checks(rec, n_))
      if (!b.holds) flag("bound_" + b.name, b.lhs, b.rhs);
    prev_ = rec;
    total_ += bad;
    return bad;
  }
  int total() const { return total_; }

 private:
  int n_;
  double tol_;
  int total_ = 0;
  std::optional<DiagnosticsRecord> prev_;
};

std::string snapshot_name(int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshots/snapshot_%04d.csv", index);
  return buf;
}

json config_record(const RunConfig& c) {
  return {{"event", "start"},
          {"mode", mode_name(c.mode)},
          {"n_space", c.n_space},
          {"n_time", c.n_time},
          {"samples", c.grid.size()},
          {"seed", c.seed}};
}

struct Artifacts {
  RunLog log;
  CsvTable diagnostics{[] {
    auto cols = diagnostics_columns();
    cols.insert(cols.begin() + 1, "step");
    return cols;
  }()};
  int snapshots = 0;

  void add_diagnostics(int step, const DiagnosticsRecord& rec) {
    auto v = diagnostics_values(rec);
    v.insert(v.begin() + 1, static_cast<double>(step));
    diagnostics.add_row(v);
  }
  void snapshot(const RunConfig& cfg, const VertexImmersion& im, double time, const char* kind = "snapshot") {
    const std::string name = snapshot_name(snapshots++);
    write_immersion_csv(cfg.output_dir / name, im);
    log.add({{"event", kind}, {"time", time}, {"file", name}});
  }
  void finish(const RunConfig& cfg) {
    atomic_write(cfg.output_dir / "diagnostics.csv", diagnostics.str());
    log.write(cfg.output_dir / "run_log.jsonl");
  }
};

// Diagnoses, logs violations and returns the number found. Acausal pairs or a vanishing mean
// curvature count as one violation and set `fatal`.
int diagnose_into(Artifacts& art, InvariantMonitor& mon, const VertexImmersion& im, const GeometryCache& geo,
                  double time, int step, bool& fatal) {
  fatal = true;
  try {
    const DiagnosticsRecord rec = diagnose(im, geo, time);
    art.add_diagnostics(step, rec);
    fatal = false;
    return mon.check(rec, art.log);
  } catch (const AcausalityError& e) {
    art.log.add({{"event", "violation"}, {"time", time}, {"quantity", "acausality"}, {"reason", e.what()}});
  } catch (const PreconditionError& e) {
    art.log.add({{"event", "violation"}, {"time", time}, {"quantity", "precondition"}, {"reason", e.what()}});
  }
  return 1;
}

RunOutcome finish_outcome(RunOutcome out, int violations) {
  out.violations = violations;
  if (out.exit_code == exit_ok && violations > 0) {
    out.exit_code = exit_invariant_violation;
    out.reason = "invariant violation";
  }
  return out;
}

RunOutcome run_mcf_mode(const RunConfig& cfg, Artifacts& art) {
  RunOutcome out;
  FlowOptions opt;
  opt.cfl = cfg.cfl;
  opt.h2_ceiling = cfg.h2_ceiling;
  FlowState st = make_state(make_fixture(cfg));
  InvariantMonitor mon(cfg.grid.n, cfg.monotonicity_tol);
  bool fatal = false;
  int bad = diagnose_into(art, mon, st.im, st.geo, 0.0, 0, fatal);
  size_t next_snap = 0;
  auto snap_due = [&] {
    while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] <= st.t + 1e-12) {
      art.snapshot(cfg, st.im, st.t);
      ++next_snap;
    }
  };
  snap_due();
  int step = 0;
  try {
    while (cfg.t_end - st.t > 1e-14 * std::max(1.0, cfg.t_end) && !fatal) {
      double target = cfg.t_end;
      if (next_snap < cfg.snapshot_times.size()) target = std::min(target, cfg.snapshot_times[next_snap]);
      const double limit = dt_max(st, cfg.cfl);
      const double dt = std::min({cfg.dt, limit, target - st.t});
      st = mcf_step(st, dt, opt);
      ++step;
      const double h2 = sup_companion_h2(st.geo);
      art.log.add({{"event", "step"},
                    {"step", step},
                    {"time", st.t},
                    {"dt", st.dt_last},
                    {"dt_requested", dt},
                    {"accepted", true},
                    {"area", st.geo.area},
                    {"sup_h2", h2}});
      if (h2 > cfg.h2_ceiling) throw SingularStop("curvature ceiling exceeded", st.t);
      if (step % cfg.diagnostics_every == 0) bad += diagnose_into(art, mon, st.im, st.geo, st.t, step, fatal);
      snap_due();
    }
  } catch (const SingularStop& e) {
    out.exit_code = exit_singular_stop;
    out.reason = e.what();
    art.log.add({{"event", "singular_stop"}, {"time", e.time}, {"reason", e.what()}});
  }
  if (out.exit_code == exit_ok && step % cfg.diagnostics_every != 0)
    bad += diagnose_into(art, mon, st.im, st.geo, st.t, step, fatal);
  if (cfg.snapshot_times.empty()) art.snapshot(cfg, st.im, st.t, "final");
  out.steps = step;
  out.final_time = st.t;
  return finish_outcome(out, bad);
}

RunOutcome run_normalized_mode(const RunConfig& cfg, Artifacts& art) {
  RunOutcome out;
  NormalizedOptions opt;
  opt.flow.cfl = cfg.cfl;
  opt.flow.h2_ceiling = cfg.h2_ceiling;
  opt.reproject_every = cfg.reproject_every;
  NormalizedFlow nf(make_fixture(cfg), opt);
  InvariantMonitor mon(cfg.grid.n, cfg.monotonicity_tol);
  bool fatal = false;
  int bad = diagnose_into(art, mon, nf.state().im, nf.state().geo, 0.0, 0, fatal);

  CsvTable spectra({"tau", "gamma", "field", "coefficient"});
  std::vector<double> tau_series, total_series;
  std::map<std::string, std::map<int, std::vector<double>>> mode_series;
  int degree_max = 0;
  double next_spectrum = 0.0;
  auto record_spectrum = [&] {
    const ModeSpectrum sp = spectrum_of(nf.state().im);
    degree_max = sp.degree_max;
    const double tau = nf.tau();
    tau_series.push_back(tau);
    total_series.push_back(sp.l2_sigma + sp.l2_eta);
    for (int g = 0; g <= sp.degree_max; ++g) {
      const double s = sp.degree_norm(ModeField::sigma, g);
      spectra.add_row({format_double(tau), std::to_string(g), "sigma", format_double(s)});
      mode_series["sigma"][g].push_back(s);
      for (size_t a = 0; a < sp.eta_modes.size(); ++a) {
        const double e = sp.degree_norm(ModeField::eta, g, static_cast<int>(a));
        const std::string name = "eta" + std::to_string(a);
        spectra.add_row({format_double(tau), std::to_string(g), name, format_double(e)});
        mode_series[name][g].push_back(e);
      }
    }
    next_spectrum = tau + cfg.spectra_every;
  };
  record_spectrum();

  size_t next_snap = 0;
  int step = 0;
  try {
    while (cfg.tau_end - nf.tau() > 1e-14 * std::max(1.0, cfg.tau_end) && !fatal) {
      double target = std::min(cfg.tau_end, next_spectrum);
      if (next_snap < cfg.snapshot_times.size()) target = std::min(target, cfg.snapshot_times[next_snap]);
      const double dtau = std::min({cfg.dtau, nf.dt_limit(), target - nf.tau()});
      nf.step(dtau);
      ++step;
      const NormalizationCoeffs& c = nf.coeffs();
      art.log.add({{"event", "step"},
                   {"step", step},
                   {"tau", nf.tau()},
                   {"dtau", nf.state().dt_last},
                   {"accepted", true},
                   {"t", c.t_of_tau},
                   {"psi", c.psi},
                   {"a", c.a},
                   {"L_norm", c.L.norm()},
                   {"q_condition", c.q_condition},
                   {"regularized", c.regularized}});
      if (step % cfg.diagnostics_every == 0)
        bad += diagnose_into(art, mon, nf.state().im, nf.state().geo, nf.tau(), step, fatal);
      if (nf.tau() >= next_spectrum - 1e-12) record_spectrum();
      while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] <= nf.tau() + 1e-12) {
        art.snapshot(cfg, nf.state().im, nf.tau());
        ++next_snap;
      }
    }
  } catch (const SingularStop& e) {
    out.exit_code = exit_singular_stop;
    out.reason = e.what();
    art.log.add({{"event", "singular_stop"}, {"tau", e.time}, {"reason", e.what()}});
  }
  if (tau_series.back() < nf.tau()) record_spectrum();
  art.snapshot(cfg, nf.state().im, nf.tau(), "final");
  art.snapshot(cfg, nf.reconstructed(), nf.reconstruction().t, "reconstructed");

  json summary;
  summary["tau_end"] = nf.tau();
  summary["t_of_tau_end"] = nf.reconstruction().t;
  summary["psi_end"] = std::exp(nf.reconstruction().log_psi);
  summary["final_l2_total"] = total_series.back();
  summary["n"] = cfg.grid.n;
  try {
    const auto window = select_linear_window(tau_series, total_series, cfg.fit_lo, cfg.fit_hi);
    DecayFit total = fit_decay(tau_series, total_series, window);
    summary["window"] = {window.first, window.second};
    summary["total_rate"] = total.rate;
    summary["total_squared_rate"] = 2.0 * total.rate;
    summary["total_r2"] = total.r2;
    out.fitted_rates["total"] = total.rate;
    json modes = json::array();
    for (const auto& [field, per_degree] : mode_series) {
      const ModeField mf = field == "sigma" ? ModeField::sigma : ModeField::eta;
      for (int g = 2; g <= std::min(degree_max, 6); ++g) {
        json m{{"field", field}, {"gamma", g}};
        m["linearized_rate"] = linearized_mode_rate(cfg.grid.n, g, mf);
        m["exact_linear_rate"] = exact_linear_rate(cfg.grid.n, g, mf);
        try {
          const double r = fit_decay(tau_series, per_degree.at(g), window).rate;
          m["fitted_rate"] = r;
          m["relative_error_vs_linearized"] = std::abs(r - m["linearized_rate"].get<double>()) /
                                              std::abs(m["linearized_rate"].get<double>());
          m["relative_error_vs_exact"] = std::abs(r - m["exact_linear_rate"].get<double>()) /
                                         std::abs(m["exact_linear_rate"].get<double>());
          out.fitted_rates[field + "_" + std::to_string(g)] = r;
        } catch (const FitError& e) {
          m["fitted_rate"] = nullptr;
          m["fit_error"] = e.what();
        }
        modes.push_back(m);
      }
    }
    summary["modes"] = modes;
  } catch (const FitError& e) {
    summary["window"] = nullptr;
    summary["fit_error"] = e.what();
  }
  atomic_write(cfg.output_dir / "spectra.csv", spectra.str());
  atomic_write(cfg.output_dir / "fit_summary.json", summary.dump(2) + "\n");
  if (out.exit_code == exit_ok && step % cfg.diagnostics_every != 0)
    bad += diagnose_into(art, mon, nf.state().im, nf.state().geo, nf.tau(), step, fatal);
  out.steps = step;
  out.final_time = nf.tau();
  return finish_outcome(out, bad);
}

RunOutcome run_rescale_mode(const RunConfig& cfg, Artifacts& art) {
  if (cfg.snapshot_times.empty()) throw ConfigError("rescale_sequence needs time.snapshots");
  RunOutcome out;
  FlowOptions opt;
  opt.cfl = cfg.cfl;
  opt.h2_ceiling = cfg.h2_ceiling;
  FlowState st = make_state(make_fixture(cfg));
  InvariantMonitor mon(cfg.grid.n, cfg.monotonicity_tol);
  bool fatal = false;
  int bad = diagnose_into(art, mon, st.im, st.geo, 0.0, 0, fatal);
  std::vector<double> times, volumes;
  LorentzMap plane = LorentzMap::identity(st.im.space);
  auto sample_volume = [&] {
    plane = min_volume_plane(st.im, plane);
    times.push_back(st.t);
    volumes.push_back(projected_volume(st.im, plane));
  };
  sample_volume();
  CsvTable table({"index", "time", "T_est", "lambda", "l2_sigma", "l2_eta"});
  size_t next_snap = 0;
  int step = 0;
  auto take = [&] {
    while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] <= st.t + 1e-12) {
      const double T_est = estimate_extinction_time(times, volumes, cfg.grid.n);
      const VertexImmersion r = rescaled_sequence({st}, T_est).front();
      const ModeSpectrum sp = spectrum_of(r);
      table.add_row(std::vector<double>{static_cast<double>(next_snap), st.t, T_est, 1.0 / std::sqrt(T_est - st.t),
                                        sp.l2_sigma, sp.l2_eta});
      art.snapshot(cfg, r, st.t, "rescaled");
      ++next_snap;
    }
  };
  try {
    while (cfg.t_end - st.t > 1e-14 * std::max(1.0, cfg.t_end) && next_snap < cfg.snapshot_times.size() &&
           !fatal) {
      const double target = std::min(cfg.t_end, cfg.snapshot_times[next_snap]);
      const double dt = std::min({cfg.dt, dt_max(st, cfg.cfl), target - st.t});
      st = mcf_step(st, dt, opt);
      ++step;
      const double h2 = sup_companion_h2(st.geo);
      art.log.add({{"event", "step"}, {"step", step}, {"time", st.t}, {"dt", st.dt_last}, {"accepted", true},
                   {"sup_h2", h2}});
      if (h2 > cfg.h2_ceiling) throw SingularStop("curvature ceiling exceeded", st.t);
      sample_volume();
      if (step % cfg.diagnostics_every == 0) bad += diagnose_into(art, mon, st.im, st.geo, st.t, step, fatal);
      if (times.size() >= 2) take();
    }
  } catch (const SingularStop& e) {
    out.exit_code = exit_singular_stop;
    out.reason = e.what();
    art.log.add({{"event", "singular_stop"}, {"time", e.time}, {"reason", e.what()}});
  }
  atomic_write(cfg.output_dir / "rescaled.csv", table.str());
  out.steps = step;
  out.final_time = st.t;
  return finish_outcome(out, bad);
}

RunOutcome run_diagnose_mode(const RunConfig& cfg, Artifacts& art) {
  RunOutcome out;
  const VertexImmersion im = make_fixture(cfg);
  const GeometryCache geo = compute_geometry(im);
  InvariantMonitor mon(cfg.grid.n, cfg.monotonicity_tol);
  bool fatal = false;
  const int bad = diagnose_into(art, mon, im, geo, 0.0, 0, fatal);
  return finish_outcome(out, bad);
}

}  // namespace

VertexImmersion make_fixture(const RunConfig& cfg) {
  const SignatureSpace sp(cfg.n_space, cfg.n_time);
  try {
    switch (cfg.fixture) {
      case FixtureKind::circle:
      case FixtureKind::sphere:
        return sphere_fixture(sp, cfg.radius, cfg.grid);
      case FixtureKind::paper_gamma:
        return paper_gamma_fixture(cfg.grid.m);
      case FixtureKind::gauss:
        return reconstruct(gauss_fixture(sp, cfg.grid, cfg.sigma, cfg.eta));
      case FixtureKind::random_gauss:
        return reconstruct(random_gauss_fixture(sp, cfg.grid, cfg.seed, cfg.random_amplitude));
      case FixtureKind::file: {
        VertexImmersion im = read_immersion_csv(cfg.fixture_path);
        if (!(im.space == sp)) throw ConfigError("fixture file signature differs from [space]");
        if (!(im.grid == cfg.grid)) throw ConfigError("fixture file grid differs from [grid]");
        return im;
      }
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("fixture: ") + e.what());
  } catch (const ReconstructionError& e) {
    throw ConfigError(std::string("fixture: ") + e.what());
  } catch (const IoError& e) {
    throw ConfigError(std::string("fixture: ") + e.what());
  }
  throw ConfigError("unhandled fixture kind");
}

RunOutcome run(const RunConfig& cfg) {
  Artifacts art;
  art.log.add(config_record(cfg));
  RunOutcome out;
  try {
    switch (cfg.mode) {
      case RunMode::mcf: out = run_mcf_mode(cfg, art); break;
      case RunMode::normalized: out = run_normalized_mode(cfg, art); break;
      case RunMode::rescale_sequence: out = run_rescale_mode(cfg, art); break;
      case RunMode::diagnose_only: out = run_diagnose_mode(cfg, art); break;
    }
  } catch (const ConfigError& e) {
    out.exit_code = exit_config_error;
    out.reason = e.what();
  } catch (const std::exception& e) {
    // Numerical failures outside the singular-stop path (plane search, conversion).
    out.exit_code = exit_invariant_violation;
    out.reason = e.what();
  }
  if (out.exit_code != exit_ok)
    art.log.add({{"event", "error"}, {"exit_code", out.exit_code}, {"reason", out.reason}});
  art.log.add({{"event", "end"}, {"exit_code", out.exit_code}, {"steps", out.steps}, {"violations", out.violations}});
  art.finish(cfg);
  return out;
}

RunOutcome run_config_file(const fs::path& path, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  try {
    ConfigMap map = load_config_file(path);
    for (const auto& o : overrides) apply_override(map, o);
    cfg = build_config(map, path.parent_path());
  } catch (const ConfigError& e) {
    RunOutcome out;
    out.exit_code = exit_config_error;
    out.reason = e.what();
    std::cerr << json{{"event", "error"}, {"exit_code", out.exit_code}, {"reason", out.reason}, {"config", path.string()}}
                     .dump()
              << '\n';
    return out;
  }
  return run(cfg);
}

int thread_count_from_env() {
  if (const char* v = std::getenv("LMCF_THREADS")) {
    const int n = std::atoi(v);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepOutcome sweep(const fs::path& dir, const std::vector<std::string>& overrides, const fs::path& summary,
                   int threads) {
  SweepOutcome res;
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".ini") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << json{{"event", "error"}, {"exit_code", exit_config_error}, {"reason", "no configurations in sweep directory"}}
                     .dump()
              << '\n';
    res.exit_code = exit_config_error;
    return res;
  }
  // Output directories must be distinct before anything runs.
  std::vector<fs::path> outs;
  for (const auto& f : files) {
    try {
      ConfigMap map = load_config_file(f);
      for (const auto& o : overrides) apply_override(map, o);
      outs.push_back(fs::weakly_canonical(build_config(map, f.parent_path()).output_dir));
    } catch (const ConfigError&) {
      outs.push_back(f);  // reported as a failed child below
    }
  }
  auto sorted = outs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    std::cerr << json{{"event", "error"}, {"exit_code", exit_config_error}, {"reason", "sweep output directories are not distinct"}}
                     .dump()
              << '\n';
    res.exit_code = exit_config_error;
    return res;
  }

  res.runs.resize(files.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < files.size();) res.runs[i] = {files[i], run_config_file(files[i], overrides)};
  };
  std::vector<std::thread> pool;
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(files.size())));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  CsvTable table({"config", "exit_code", "reason", "steps", "final_time", "violations", "total_rate", "sigma_2_rate",
                  "eta0_2_rate"});
  int ok = 0;
  for (const auto& [path, o] : res.runs) {
    auto rate = [&](const std::string& k) {
      const auto it = o.fitted_rates.find(k);
      return it == o.fitted_rates.end() ? std::string("nan") : format_double(it->second);
    };
    std::string reason = o.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    table.add_row({path.filename().string(), std::to_string(o.exit_code), reason, std::to_string(o.steps),
                   format_double(o.final_time), std::to_string(o.violations), rate("total"), rate("sigma_2"),
                   rate("eta0_2")});
    if (o.exit_code == exit_ok) ++ok;
  }
  atomic_write(summary, table.str());
  res.exit_code = ok > 0 ? exit_ok : exit_invariant_violation;
  return res;
}

}  // namespace lmcf
