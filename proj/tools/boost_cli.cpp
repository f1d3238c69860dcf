#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cavboost/config.hpp"
#include "cavboost/errors.hpp"
#include "cavboost/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kPhysics = 3, kConvergence = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven spin-cavity boosting simulator"};
  app.set_version_flag("--version", CAVBOOST_VERSION);
  app.require_subcommand(1);

  std::string experiment, config_path = "paper-fig1", out_dir = ".";
  bool no_correction = false;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run a registered experiment");
  run->add_option("experiment", experiment, "Experiment name (see `boost list`)")->required();
  run->add_option("--config", config_path, "INI config file or preset name")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_flag("--no-correction", no_correction, "Use the bare cavity frequency for predictions");
  run->add_option("--seed", seed, "Recorded in the manifest; no experiment draws random numbers");

  std::string what;
  std::string predict_out;
  auto* predict = app.add_subcommand("predict", "Number-theoretic predictions");
  predict->add_option("what", what, "Prediction name: almost-periods")->required();
  predict->add_option("--config", config_path, "INI config file or preset name")->capture_default_str();
  predict->add_option("--out", predict_out, "Also write almost-periods.csv into this directory");
  predict->add_flag("--no-correction", no_correction, "Use the bare cavity frequency");

  auto* list = app.add_subcommand("list", "List registered experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& name : cavboost::experiment_names()) std::cout << name << "\n";
      return kOk;
    }
    cavboost::ExperimentConfig cfg = cavboost::load_config(config_path);
    if (no_correction) cfg.correction = false;
    cfg.seed = seed;

    if (predict->parsed()) {
      if (what != "almost-periods") throw cavboost::ConfigError("unknown prediction '" + what + "'");
      const auto pred = cavboost::predict_almost_periods(cfg);
      std::cout << cavboost::format_prediction(pred);
      if (!predict_out.empty()) {
        std::filesystem::create_directories(predict_out);
        const auto path = std::filesystem::path(predict_out) / "almost-periods.csv";
        const auto table = cavboost::almost_period_table(pred, cfg.model);
        table.write(path.string());
        cavboost::validate_csv(path.string(), table.header());
      }
      return kOk;
    }

    const auto report = cavboost::run_experiment(experiment, cfg, out_dir);
    std::cout << report.experiment << ": " << report.files.size() << " files in " << out_dir << " ("
              << report.wall_seconds << " s, leakage max " << report.leakage_max << ")\n";
    for (const auto& f : report.files) std::cout << "  " << f << "\n";
    return kOk;
  } catch (const cavboost::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const cavboost::PhysicsGuardError& e) {
    std::cerr << "physics guard: " << e.what() << "\n";
    return kPhysics;
  } catch (const cavboost::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }
}
