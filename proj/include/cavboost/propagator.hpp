#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cavboost/model.hpp"

namespace cavboost {

enum class Scheme {
  /// Commutator-free fourth-order Magnus stepping, exponentials applied to the
  /// state by a truncated Taylor series (default).
  Magnus4,
  /// Same stepping with dense Pade exponentials of each step generator.
  Magnus4Dense,
  /// Second-order exponential midpoint rule.
  Midpoint,
};

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

/// Times are in units of the drive period of the Hamiltonian being evolved.
struct EvolutionConfig {
  double dt_max = 1.0 / 256.0;
  double tol_norm = 1e-9;
  std::vector<double> sample_times;
  Scheme scheme = Scheme::Magnus4;
  /// Tail mass sum_{n >= n_max - 2} P(n) allowed at any sample time.
  double leakage_threshold = 1e-8;
  /// Halvings of dt_max allowed while seeking a convergence certificate.
  int max_halvings = 4;

  void validate() const;

  /// k / 8 periods for k = 0..8 * periods.
  static std::vector<double> default_samples(double periods = 16.0, int per_period = 8);
};

struct ConvergenceCertificate {
  double step = 0.0;          // absolute step of the accepted run
  double halving_change = 0;  // || psi(dt) - psi(dt/2) ||
  double norm_drift = 0.0;
  int halvings = 0;
};

/// Tail mass sum_{n >= n_max - 2} P(n).
double tail_mass(const QuantumState& psi);

/// Propagate psi0 from t0 to t1 (absolute times). Throws ConvergenceError when
/// the norm drifts by more than cfg.tol_norm and LeakageError when the final
/// tail mass exceeds cfg.leakage_threshold.
QuantumState evolve(const QuantumState& psi0, const Hamiltonian& h, double t0, double t1,
                    const EvolutionConfig& cfg);

/// As evolve, with an explicit step instead of cfg.dt_max and no guards.
/// t1 < t0 propagates backwards in time.
QuantumState evolve_with_step(const QuantumState& psi0, const Hamiltonian& h, double t0, double t1,
                              double step, Scheme scheme);

/// Runs at dt and dt/2 until the two agree to 10 tol_norm in vector norm,
/// halving at most cfg.max_halvings times. Returns the finer state; throws
/// ConvergenceError when the step floor is reached.
std::pair<QuantumState, ConvergenceCertificate> evolve_certified(const QuantumState& psi0,
                                                                 const Hamiltonian& h, double t0,
                                                                 double t1,
                                                                 const EvolutionConfig& cfg);

/// A named diagnostic evaluated on the state at each sample time. Scalar
/// observables return a single-element vector.
struct Observer {
  std::string name;
  std::function<std::vector<double>(const QuantumState&)> fn;
};

struct ObservableSeries {
  std::vector<double> times;  // units of the drive period
  std::map<std::string, std::vector<std::vector<double>>> channels;
  QuantumState final_state;
  double leakage_max = 0.0;
  double norm_drift_max = 0.0;

  /// Scalar channel as a flat series.
  std::vector<double> scalar(const std::string& name) const;
};

ObservableSeries evolve_observed(const QuantumState& psi0, const Hamiltonian& h,
                                 const EvolutionConfig& cfg, const std::vector<Observer>& observers);

/// Like evolve_observed, but `transform` is applied (e.g. a frame map) to the
/// state before the observers see it. The transform receives absolute time.
ObservableSeries evolve_observed(
    const QuantumState& psi0, const Hamiltonian& h, const EvolutionConfig& cfg,
    const std::vector<Observer>& observers,
    const std::function<QuantumState(const QuantumState&, double)>& transform);

}  // namespace cavboost
