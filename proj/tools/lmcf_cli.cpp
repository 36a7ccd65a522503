#include "lmcf/config.hpp"
#include "lmcf/diagnostics.hpp"
#include "lmcf/io.hpp"
#include "lmcf/runner.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Mean curvature flow of spacelike submanifolds in pseudo-Euclidean space"};
  app.require_subcommand(1);
  std::vector<std::string> overrides;

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute one configured run");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--override", overrides, "section.key=value (repeatable)");

  std::string sweep_dir, sweep_summary;
  auto* sweep = app.add_subcommand("sweep", "Run every *.ini in a directory");
  sweep->add_option("dir", sweep_dir, "Directory of configuration files")->required();
  sweep->add_option("--override", overrides, "section.key=value applied to every run");
  sweep->add_option("--summary", sweep_summary, "Summary CSV (default <dir>/sweep_summary.csv)");

  std::string immersion_path;
  auto* diag = app.add_subcommand("diagnose", "Diagnostics of an immersion CSV");
  diag->add_option("immersion", immersion_path, "Immersion CSV written by a run")->required();

  auto* defaults = app.add_subcommand("defaults", "Print every configuration key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lmcf::exit_config_error;
  }

  if (*run) return lmcf::run_config_file(config_path, overrides).exit_code;

  if (*sweep) {
    const std::filesystem::path summary =
        sweep_summary.empty() ? std::filesystem::path(sweep_dir) / "sweep_summary.csv" : std::filesystem::path(sweep_summary);
    return lmcf::sweep(sweep_dir, overrides, summary, lmcf::thread_count_from_env()).exit_code;
  }

  if (*defaults) {
    std::cout << lmcf::default_config_text();
    return 0;
  }

  if (*diag) {
    try {
      const auto im = lmcf::read_immersion_csv(immersion_path);
      const auto geo = lmcf::compute_geometry(im);
      const auto rec = lmcf::diagnose(im, geo, 0.0);
      lmcf::CsvTable table(lmcf::diagnostics_columns());
      table.add_row(lmcf::diagnostics_values(rec));
      std::cout << table.str();
      bool ok = rec.convex_margin > 0.0 && rec.acausal_margin > 0.0;
      for (const auto& b : lmcf::bound_checks(rec, im.grid.n)) {
        std::cout << "# bound " << b.name << ' ' << lmcf::format_double(b.lhs) << " <= " << lmcf::format_double(b.rhs)
                  << (b.holds ? " ok" : " VIOLATED") << '\n';
        ok = ok && b.holds;
      }
      return ok ? 0 : lmcf::exit_invariant_violation;
    } catch (const lmcf::IoError& e) {
      std::cerr << nlohmann::json{{"event", "error"}, {"exit_code", 4}, {"reason", e.what()}}.dump() << '\n';
      return lmcf::exit_config_error;
    } catch (const std::exception& e) {
      std::cerr << nlohmann::json{{"event", "error"}, {"exit_code", 2}, {"reason", e.what()}}.dump() << '\n';
      return lmcf::exit_invariant_violation;
    }
  }
  return 0;
}
