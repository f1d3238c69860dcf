#include "cavboost/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavboost/errors.hpp"
#include "cavboost/linalg.hpp"

namespace cavboost {

Scheme parse_scheme(const std::string& name) {
  if (name == "magnus4" || name == "cf4") return Scheme::Magnus4;
  if (name == "magnus4-dense" || name == "cf4-dense") return Scheme::Magnus4Dense;
  if (name == "midpoint") return Scheme::Midpoint;
  throw ConfigError("unknown integrator scheme '" + name + "'");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Magnus4: return "magnus4";
    case Scheme::Magnus4Dense: return "magnus4-dense";
    case Scheme::Midpoint: return "midpoint";
  }
  return "?";
}

void EvolutionConfig::validate() const {
  if (!(dt_max > 0.0)) throw ConfigError("dt_max must be positive");
  if (!(tol_norm >= 0.0)) throw ConfigError("tol_norm must be non-negative");
  for (std::size_t i = 1; i < sample_times.size(); ++i) {
    if (!(sample_times[i] > sample_times[i - 1]))
      throw ConfigError("sample_times must be strictly increasing");
  }
  if (max_halvings < 1) throw ConfigError("max_halvings must be at least 1");
}

std::vector<double> EvolutionConfig::default_samples(double periods, int per_period) {
  const int count = static_cast<int>(std::lround(periods * per_period));
  std::vector<double> t(count + 1);
  for (int k = 0; k <= count; ++k) t[k] = static_cast<double>(k) / per_period;
  return t;
}

double tail_mass(const QuantumState& psi) {
  const int n_max = psi.n_max();
  double mass = 0.0;
  for (int n = std::max(0, n_max - 2); n <= n_max; ++n) {
    mass += std::norm(psi.amp(n, 0)) + std::norm(psi.amp(n, 1));
  }
  return mass;
}

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kNodeLo = 0.5 - kSqrt3 / 6.0;
const double kNodeHi = 0.5 + kSqrt3 / 6.0;
const double kAlphaLo = (3.0 - 2.0 * kSqrt3) / 12.0;
const double kAlphaHi = (3.0 + 2.0 * kSqrt3) / 12.0;

CVector apply_exp(const SpMatrix& generator, const CVector& v, Scheme scheme) {
  if (scheme == Scheme::Magnus4Dense) return expm(CMatrix(generator)) * v;
  return expm_action(generator, v);
}

void step(const Hamiltonian& h, double t, double dt, Scheme scheme, CVector& psi) {
  const Complex minus_i_dt(0.0, -dt);
  if (scheme == Scheme::Midpoint) {
    const double times[] = {t + 0.5 * dt};
    const double w[] = {1.0};
    psi = apply_exp(minus_i_dt * h.combine(times, w), psi, scheme);
    return;
  }
  const double times[] = {t + kNodeLo * dt, t + kNodeHi * dt};
  const double first[] = {kAlphaHi, kAlphaLo};
  const double second[] = {kAlphaLo, kAlphaHi};
  psi = apply_exp(minus_i_dt * h.combine(times, first), psi, scheme);
  psi = apply_exp(minus_i_dt * h.combine(times, second), psi, scheme);
}

}  // namespace

QuantumState evolve_with_step(const QuantumState& psi0, const Hamiltonian& h, double t0, double t1,
                              double max_step, Scheme scheme) {
  if (!(max_step > 0.0)) throw ConfigError("step must be positive");
  QuantumState psi = psi0;
  const double span = t1 - t0;
  if (span == 0.0) {
    psi.time = t1;
    return psi;
  }
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(span) / max_step - 1e-9)));
  const double dt = span / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) step(h, t0 + k * dt, dt, scheme, psi.amps);
  psi.time = t1;
  return psi;
}

namespace {

void check_guards(const QuantumState& psi, const EvolutionConfig& cfg) {
  const double drift = std::abs(psi.norm() - 1.0);
  if (drift > cfg.tol_norm) {
    std::ostringstream os;
    os << "norm drift " << drift << " exceeds tolerance " << cfg.tol_norm << " at t = " << psi.time;
    throw ConvergenceError(os.str());
  }
  const double tail = tail_mass(psi);
  if (tail > cfg.leakage_threshold) {
    std::ostringstream os;
    os << "truncation leakage " << tail << " exceeds " << cfg.leakage_threshold << " at t = " << psi.time
       << "; increase n_max";
    throw LeakageError(os.str());
  }
}

}  // namespace

QuantumState evolve(const QuantumState& psi0, const Hamiltonian& h, double t0, double t1,
                    const EvolutionConfig& cfg) {
  cfg.validate();
  if (t1 < t0) throw ConfigError("evolve requires t1 >= t0");
  QuantumState psi = evolve_with_step(psi0, h, t0, t1, cfg.dt_max * h.period * h.step_scale, cfg.scheme);
  check_guards(psi, cfg);
  return psi;
}

std::pair<QuantumState, ConvergenceCertificate> evolve_certified(const QuantumState& psi0,
                                                                 const Hamiltonian& h, double t0,
                                                                 double t1,
                                                                 const EvolutionConfig& cfg) {
  cfg.validate();
  if (t1 < t0) throw ConfigError("evolve requires t1 >= t0");
  double dt = cfg.dt_max * h.period * h.step_scale;
  QuantumState coarse = evolve_with_step(psi0, h, t0, t1, dt, cfg.scheme);
  double change = 0.0;
  for (int k = 1; k <= cfg.max_halvings; ++k) {
    dt *= 0.5;
    QuantumState fine = evolve_with_step(psi0, h, t0, t1, dt, cfg.scheme);
    change = (fine.amps - coarse.amps).norm();
    if (change < 10.0 * cfg.tol_norm) {
      check_guards(fine, cfg);
      ConvergenceCertificate cert{dt, change, std::abs(fine.norm() - 1.0), k};
      return {fine, cert};
    }
    coarse = std::move(fine);
  }
  std::ostringstream os;
  os << "step floor reached after " << cfg.max_halvings << " halvings; last change " << change;
  throw ConvergenceError(os.str());
}

std::vector<double> ObservableSeries::scalar(const std::string& name) const {
  const auto it = channels.find(name);
  if (it == channels.end()) throw ConfigError("no channel named '" + name + "'");
  std::vector<double> out;
  out.reserve(it->second.size());
  for (const auto& row : it->second) out.push_back(row.empty() ? 0.0 : row.front());
  return out;
}

ObservableSeries evolve_observed(const QuantumState& psi0, const Hamiltonian& h,
                                 const EvolutionConfig& cfg, const std::vector<Observer>& observers) {
  return evolve_observed(psi0, h, cfg, observers, nullptr);
}

ObservableSeries evolve_observed(
    const QuantumState& psi0, const Hamiltonian& h, const EvolutionConfig& cfg,
    const std::vector<Observer>& observers,
    const std::function<QuantumState(const QuantumState&, double)>& transform) {
  cfg.validate();
  if (cfg.sample_times.empty()) throw ConfigError("evolve_observed needs at least one sample time");
  const double step = cfg.dt_max * h.period * h.step_scale;
  ObservableSeries out;
  out.times = cfg.sample_times;
  for (const auto& o : observers) out.channels[o.name].reserve(cfg.sample_times.size());

  QuantumState psi = psi0;
  for (double tau : cfg.sample_times) {
    const double t = tau * h.period;
    if (t < psi.time - 1e-12) throw ConfigError("sample time precedes the initial state time");
    psi = evolve_with_step(psi, h, psi.time, t, step, cfg.scheme);
    check_guards(psi, cfg);
    out.leakage_max = std::max(out.leakage_max, tail_mass(psi));
    out.norm_drift_max = std::max(out.norm_drift_max, std::abs(psi.norm() - 1.0));
    const QuantumState seen = transform ? transform(psi, t) : psi;
    for (const auto& o : observers) out.channels[o.name].push_back(o.fn(seen));
  }
  out.final_state = psi;
  return out;
}

}  // namespace cavboost
