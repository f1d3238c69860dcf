#pragma once

// Named experiment presets. Each experiment writes one or more CSV files and
// a JSON manifest next to every CSV.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cavboost/config.hpp"
#include "cavboost/csv.hpp"
#include "cavboost/observables.hpp"
#include "cavboost/propagator.hpp"
#include "cavboost/quasiperiodic.hpp"

namespace cavboost {

std::vector<std::string> experiment_names();
bool is_experiment(const std::string& name);

struct RunReport {
  std::string experiment;
  std::vector<std::string> files;  // CSV files, in write order
  double leakage_max = 0.0;
  double norm_drift_max = 0.0;
  std::vector<std::pair<std::string, ConvergenceCertificate>> certificates;
  nlohmann::json summary = nlohmann::json::object();
  double wall_seconds = 0.0;
};

/// Runs a registered experiment and writes its outputs into out_dir.
/// Throws ConfigError for unknown names; simulation errors propagate.
RunReport run_experiment(const std::string& name, const ExperimentConfig& cfg,
                         const std::filesystem::path& out_dir);

struct AlmostPeriodPrediction {
  double n0 = 0.0;
  double delta_omega0 = 0.0;  // zero when the correction is disabled
  double omega_eff = 0.0;
  double ratio = 0.0;         // Omega / omega_eff
  CFExpansion cf;
  std::vector<AlmostPeriod> periods;
};

/// [delta omega_0] at the initial photon number, the corrected ratio and
/// its almost periods up to cfg.h_max.
AlmostPeriodPrediction predict_almost_periods(const ExperimentConfig& cfg);
CsvTable almost_period_table(const AlmostPeriodPrediction& pred, const ModelParams& p);
std::string format_prediction(const AlmostPeriodPrediction& pred);

// --- Building blocks shared by the experiments and the tests --------------

/// Standard channels: "P(n)", "mean_n", "PR", "S_ent", "tail".
std::vector<Observer> standard_observers();

struct QuantumRun {
  ObservableSeries series;
  std::optional<ConvergenceCertificate> certificate;
};

enum class Frame { Rotating, Lab };

/// Evolves `init` under the chosen frame at the given sample times (units of
/// the drive period). Lab-frame states are mapped to the rotating frame
/// before the observers see them. A convergence certificate over the whole
/// window is attached when cfg.certify is set.
QuantumRun run_quantum(const ExperimentConfig& cfg, const InitialState& init,
                       const std::vector<double>& times, const std::vector<Observer>& observers,
                       Frame frame = Frame::Rotating);

/// Times in units of the drive period.
std::vector<double> uniform_times(double periods, int per_period);

/// Half the L1 distance between two distributions.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Index of the sample closest to time t.
std::size_t nearest_index(const std::vector<double>& times, double t);

}  // namespace cavboost
