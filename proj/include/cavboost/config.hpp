#pragma once

// Experiment configuration: a flat INI file whose sections mirror
// ExperimentConfig. Every key has a default taken from the `paper-fig1`
// preset, so a file only lists what it changes.

#include <cstdint>
#include <string>
#include <vector>

#include "cavboost/model.hpp"
#include "cavboost/propagator.hpp"

namespace cavboost {

enum class InitialKind { Fock, Coherent, Cat };
std::string to_string(InitialKind kind);

/// Spin factor of the initial product state. Axis "field" means the
/// effective field at t = 0 seen by the initial cavity state.
struct InitialState {
  InitialKind kind = InitialKind::Fock;
  int n0 = 10;
  double alpha = 0.0;    // |alpha| for coherent and cat states
  double theta02 = 0.0;  // alpha = |alpha| exp(-i theta02)
  std::string spin_axis = "x";
  int spin_sign = 1;

  /// Nominal photon number used by semiclassical predictions.
  double mean_photons() const;
};

struct ExperimentConfig {
  std::string preset = "paper-fig1";
  ModelParams model;
  EvolutionConfig evolution;
  InitialState initial;
  double periods = 16.0;
  int samples_per_period = 8;
  bool certify = true;
  int n_theta = 32;
  long long h_max = 16;
  bool correction = true;
  int q_points = 101;
  std::uint64_t seed = 0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  /// cfg.evolution.sample_times, or k / samples_per_period up to `periods`.
  std::vector<double> sample_times() const;
};

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

/// Reads an INI file. A top-level `preset = <name>` key chooses the base;
/// unknown sections or keys are errors. A bare preset name is also accepted
/// in place of a path.
ExperimentConfig load_config(const std::string& path_or_preset);
ExperimentConfig parse_config(const std::string& ini_text);

/// Serializes back to INI text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& cfg);

/// The product state described by cfg.initial.
QuantumState initial_state(const ExperimentConfig& cfg);
QuantumState initial_state(const InitialState& init, const ModelParams& p);

}  // namespace cavboost
