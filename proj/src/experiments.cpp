#include "cavboost/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "cavboost/errors.hpp"
#include "cavboost/parallel.hpp"
#include "cavboost/semiclassics.hpp"

namespace cavboost {

using nlohmann::json;

// --- Building blocks -------------------------------------------------------

std::vector<Observer> standard_observers() {
  return {
      {"P(n)", [](const QuantumState& s) { return fock_distribution(s); }},
      {"mean_n", [](const QuantumState& s) {
         return std::vector<double>{mean_photon_number(fock_distribution(s))};
       }},
      {"PR", [](const QuantumState& s) {
         return std::vector<double>{participation_ratio(fock_distribution(s))};
       }},
      {"S_ent", [](const QuantumState& s) { return std::vector<double>{entanglement_entropy(s)}; }},
      {"tail", [](const QuantumState& s) { return std::vector<double>{tail_mass(s)}; }},
  };
}

QuantumRun run_quantum(const ExperimentConfig& cfg, const InitialState& init,
                       const std::vector<double>& times, const std::vector<Observer>& observers,
                       Frame frame) {
  const ModelParams& p = cfg.model;
  Hamiltonian h = frame == Frame::Rotating ? rotating_frame_hamiltonian(p) : lab_frame_hamiltonian(p);
  const QuantumState psi0 = initial_state(init, p);
  EvolutionConfig ev = cfg.evolution;
  ev.sample_times = times;

  QuantumRun run;
  if (cfg.certify && !times.empty() && times.back() > 0.0) {
    auto [state, cert] = evolve_certified(psi0, h, 0.0, times.back() * h.period, ev);
    run.certificate = cert;
    // Sample at the certified step so the series carries the certificate.
    ev.dt_max = cert.step / (h.period * h.step_scale);
  }
  std::function<QuantumState(const QuantumState&, double)> transform;
  if (frame == Frame::Lab) {
    const double wq = *p.omega_q;
    transform = [wq](const QuantumState& s, double t) { return rotating_frame_map(s, t, wq); };
  }
  run.series = evolve_observed(psi0, h, ev, observers, transform);
  return run;
}

std::vector<double> uniform_times(double periods, int per_period) {
  return EvolutionConfig::default_samples(periods, per_period);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ConfigError("distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::size_t nearest_index(const std::vector<double>& times, double t) {
  if (times.empty()) throw ConfigError("empty time series");
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  }
  return best;
}

// --- Prediction ------------------------------------------------------------

AlmostPeriodPrediction predict_almost_periods(const ExperimentConfig& cfg) {
  const ModelParams& p = cfg.model;
  AlmostPeriodPrediction pred;
  pred.n0 = cfg.initial.mean_photons();
  pred.delta_omega0 = cfg.correction && p.b_0 != 0.0 ? delta_omega0_avg(pred.n0, p, p.spin) : 0.0;
  pred.omega_eff = p.omega + pred.delta_omega0;
  if (!(pred.omega_eff > 0.0)) throw DegeneracyError("corrected cavity frequency is not positive");
  pred.ratio = p.Omega / pred.omega_eff;
  pred.cf = continued_fraction(pred.ratio);
  pred.periods = almost_periods(p.Omega, pred.omega_eff, cfg.h_max);
  return pred;
}

CsvTable almost_period_table(const AlmostPeriodPrediction& pred, const ModelParams& p) {
  CsvTable t({"h", "k", "t_periods", "t_absolute", "kind"});
  for (const auto& a : pred.periods) {
    t.add_row({std::to_string(a.h), std::to_string(a.k), format_number(static_cast<double>(a.h)),
               format_number(a.h * p.drive_period()), to_string(a.kind)});
  }
  return t;
}

std::string format_prediction(const AlmostPeriodPrediction& pred) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "n0               " << pred.n0 << "\n"
     << "[delta omega0]   " << pred.delta_omega0 << "\n"
     << "omega'           " << pred.omega_eff << "\n"
     << "Omega / omega'   " << std::setprecision(8) << pred.ratio << "\n"
     << "continued frac   [";
  const std::size_t shown = std::min<std::size_t>(pred.cf.coeffs.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i == 1) os << "; ";
    if (i > 1) os << ", ";
    os << pred.cf.coeffs[i];
  }
  os << (pred.cf.coeffs.size() > shown ? ", ...]" : "]") << "\n\n";
  os << std::left << std::setw(6) << "h" << std::setw(6) << "k" << std::setw(14) << "T"
     << "kind\n";
  for (const auto& a : pred.periods) {
    os << std::setw(6) << a.h << std::setw(6) << a.k << std::setw(14) << std::setprecision(8) << a.T
       << to_string(a.kind) << "\n";
  }
  return os.str();
}

// --- Experiments -----------------------------------------------------------

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path out;
  RunReport& report;
  std::vector<std::vector<std::string>> headers;

  void emit(const std::string& stem, const CsvTable& table) {
    const auto path = out / (stem + ".csv");
    table.write(path.string());
    report.files.push_back(path.string());
    headers.push_back(table.header());
  }

  void absorb(const std::string& label, const QuantumRun& run) {
    report.leakage_max = std::max(report.leakage_max, run.series.leakage_max);
    report.norm_drift_max = std::max(report.norm_drift_max, run.series.norm_drift_max);
    if (run.certificate) report.certificates.emplace_back(label, *run.certificate);
  }
};

std::vector<std::string> numbered(const std::string& first, const std::string& prefix, int count) {
  std::vector<std::string> h{first};
  for (int i = 0; i < count; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

CsvTable pn_table(const ObservableSeries& s, int n_max) {
  CsvTable t(numbered("t", "P", n_max + 1));
  const auto& rows = s.channels.at("P(n)");
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    std::vector<double> r{s.times[i]};
    r.insert(r.end(), rows[i].begin(), rows[i].end());
    t.add_row(r);
  }
  return t;
}

void add_q_rows(CsvTable& table, const std::vector<double>& prefix, const QGrid& g) {
  for (std::size_t i = 0; i < g.axis.size(); ++i) {
    for (std::size_t j = 0; j < g.axis.size(); ++j) {
      std::vector<double> r = prefix;
      r.push_back(g.axis[i]);
      r.push_back(g.axis[j]);
      r.push_back(g.at(i, j));
      table.add_row(r);
    }
  }
}

InitialState fock_start(const ExperimentConfig& cfg) {
  InitialState s;
  s.kind = InitialKind::Fock;
  s.n0 = cfg.initial.kind == InitialKind::Fock ? cfg.initial.n0
                                               : static_cast<int>(std::lround(cfg.initial.mean_photons()));
  s.spin_axis = "x";
  return s;
}

double start_alpha(const ExperimentConfig& cfg) {
  return cfg.initial.kind == InitialKind::Fock ? std::sqrt(static_cast<double>(cfg.initial.n0))
                                               : cfg.initial.alpha;
}

InitialState coherent_start(const ExperimentConfig& cfg, double theta02, const std::string& axis) {
  InitialState s;
  s.kind = InitialKind::Coherent;
  s.alpha = start_alpha(cfg);
  s.theta02 = theta02;
  s.spin_axis = axis;
  return s;
}

InitialState cat_start(const ExperimentConfig& cfg) {
  InitialState s;
  s.kind = InitialKind::Cat;
  s.alpha = start_alpha(cfg);
  s.spin_axis = "x";
  return s;
}

std::vector<double> integer_times(double periods, double last) {
  std::vector<double> t;
  for (int k = 0; k <= static_cast<int>(std::floor(std::min(periods, last) + 1e-9)); ++k) t.push_back(k);
  return t;
}

Observer q_snapshot_observer() {
  return {"state", [](const QuantumState& s) {
            std::vector<double> flat(2 * s.amps.size());
            for (Eigen::Index i = 0; i < s.amps.size(); ++i) {
              flat[2 * i] = s.amps[i].real();
              flat[2 * i + 1] = s.amps[i].imag();
            }
            return flat;
          }};
}

QuantumState unflatten(const std::vector<double>& flat) {
  QuantumState s;
  s.amps.resize(static_cast<Eigen::Index>(flat.size() / 2));
  for (Eigen::Index i = 0; i < s.amps.size(); ++i) s.amps[i] = Complex(flat[2 * i], flat[2 * i + 1]);
  return s;
}

void write_almost_periods(Context& ctx, const std::string& stem) {
  const auto pred = predict_almost_periods(ctx.cfg);
  ctx.emit(stem, almost_period_table(pred, ctx.cfg.model));
  json hs = json::array();
  for (const auto& a : pred.periods) hs.push_back(a.h);
  ctx.report.summary["almost_period_h"] = hs;
  ctx.report.summary["omega_eff"] = pred.omega_eff;
}

// Unwrapped theta2 series for a coherent run, shifted so that it starts at theta02.
std::vector<double> unwrapped_phase(const ObservableSeries& s, double theta02) {
  PhaseUnwrapper unwrap;
  std::vector<double> out;
  for (double v : s.scalar("theta2")) out.push_back(unwrap(v));
  const double shift = kTwoPi * std::round((out.front() - theta02) / kTwoPi);
  for (double& v : out) v -= shift;
  return out;
}

Observer phase_observer() {
  return {"theta2", [](const QuantumState& s) { return std::vector<double>{cavity_phase(s)}; }};
}

// fig1: P(n) heat map of the boosted Fock state.
void fig1(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto times = cfg.sample_times();
  const QuantumRun run = run_quantum(cfg, cfg.initial, times, standard_observers());
  ctx.absorb("fock", run);
  ctx.emit("fig1-pn-heatmap", pn_table(run.series, cfg.model.n_max));
  CsvTable summary({"t", "mean_n", "PR", "S_ent"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    summary.add_row({times[i], run.series.scalar("mean_n")[i], run.series.scalar("PR")[i],
                     run.series.scalar("S_ent")[i]});
  }
  ctx.emit("fig1-summary", summary);
  write_almost_periods(ctx, "fig1-almost-periods");
}

// fig2: P(n) and Q-function snapshots at integer drive periods.
void fig2(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto times = integer_times(cfg.periods, 12.0);
  auto observers = standard_observers();
  observers.push_back(q_snapshot_observer());
  const QuantumRun run = run_quantum(cfg, cfg.initial, times, observers);
  ctx.absorb("fock", run);
  ctx.emit("fig2-pn", pn_table(run.series, cfg.model.n_max));

  const QGridSpec spec = QGridSpec::for_truncation(cfg.model.n_max, cfg.q_points);
  CsvTable q({"t", "re", "im", "Q"});
  CsvTable ridge({"t", "mean_n", "PR", "ridge_r2", "q_integral"});
  const auto& states = run.series.channels.at("state");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const CavityDensityMatrix rho = reduced_cavity(unflatten(states[i]));
    rho.validate();
    const QGrid grid = husimi_q(rho, spec);
    add_q_rows(q, {times[i]}, grid);
    const auto pn = fock_distribution(rho);
    ridge.add_row({times[i], mean_photon_number(pn), participation_ratio(pn),
                   husimi_ridge_radius_squared(pn), grid.integral()});
  }
  ctx.emit("fig2-qfunc", q);
  ctx.emit("fig2-ridge", ridge);
}

// fig3: semiclassical ensembles for a quasiperiodic and a periodic drive.
void fig3(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  const double n0 = cfg.initial.mean_photons();
  const auto times = uniform_times(cfg.periods, 64);
  std::vector<double> abs_times;
  for (double t : times) abs_times.push_back(t * p.drive_period());

  const double omega_q = effective_cavity_frequency(p, n0, p.spin, cfg.correction);
  const double omega_p = p.Omega * 3.0 / 5.0;  // Omega / omega' = 5 / 3
  const auto quasi = ensemble_run(EnsembleKind::Fixed, cfg.n_theta, abs_times, n0, p, omega_q, p.spin);
  const auto periodic =
      ensemble_run(EnsembleKind::Fixed, cfg.n_theta, abs_times, n0, p, omega_p, p.spin);

  auto members_table = [&](const EnsembleResult& e) {
    CsvTable t(numbered("t", "n", cfg.n_theta));
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::vector<double> r{times[i]};
      for (const auto& m : e.members) r.push_back(m.n[i]);
      t.add_row(r);
    }
    return t;
  };
  ctx.emit("fig3-quasiperiodic", members_table(quasi));
  ctx.emit("fig3-periodic", members_table(periodic));
  CsvTable var({"t", "var_quasiperiodic", "var_periodic"});
  for (std::size_t i = 0; i < times.size(); ++i) var.add_row({times[i], quasi.variance[i], periodic.variance[i]});
  ctx.emit("fig3-variance", var);

  json at_periods = json::object();
  const auto pred = predict_almost_periods(cfg);
  for (const auto& a : pred.periods) {
    at_periods[std::to_string(a.h)] = quasi.variance[nearest_index(times, static_cast<double>(a.h))];
  }
  std::vector<double> px, py;
  for (int j = 1; 5.0 * j <= cfg.periods + 1e-9; ++j) {
    px.push_back(5.0 * j);
    py.push_back(periodic.variance[nearest_index(times, 5.0 * j)]);
  }
  ctx.report.summary["quasiperiodic_variance_at_h"] = at_periods;
  ctx.report.summary["periodic_ratio"] = "5/3";
  ctx.report.summary["periodic_variance_at_periods"] = py;
  if (px.size() >= 2) ctx.report.summary["periodic_variance_slope"] = least_squares_slope(px, py);
  ctx.report.summary["omega_eff"] = omega_q;
}

Observer alignment_observer(const ModelParams& p) {
  return {"M", [p](const QuantumState& s) {
            return std::vector<double>{alignment_metric(s, p.Omega * s.time + p.theta01, p)};
          }};
}

// fig4: alignment of spin and effective field for Fock, coherent and cat starts.
void fig4(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double periods = std::min(cfg.periods, 14.0);
  const auto times = uniform_times(periods, cfg.samples_per_period);
  const std::vector<std::pair<std::string, InitialState>> starts = {
      {"fock", fock_start(cfg)}, {"coherent", coherent_start(cfg, 0.0, "x")}, {"cat", cat_start(cfg)}};
  std::vector<Observer> obs = {alignment_observer(cfg.model), q_snapshot_observer()};

  const auto runs = parallel_map(static_cast<int>(starts.size()), [&](int i) {
    return run_quantum(cfg, starts[i].second, times, obs);
  });
  CsvTable align({"t", "M_fock", "M_coherent", "M_cat"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    align.add_row({times[i], runs[0].series.scalar("M")[i], runs[1].series.scalar("M")[i],
                   runs[2].series.scalar("M")[i]});
  }
  ctx.emit("fig4-alignment", align);

  const QGridSpec spec = QGridSpec::for_truncation(cfg.model.n_max, cfg.q_points);
  CsvTable q({"state", "t", "re", "im", "Q"});
  const double snap = std::floor(periods);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    ctx.absorb(starts[k].first, runs[k]);
    const auto idx = nearest_index(times, snap);
    const auto rho = reduced_cavity(unflatten(runs[k].series.channels.at("state")[idx]));
    add_q_rows(q, {static_cast<double>(k), times[idx]}, husimi_q(rho, spec));
  }
  ctx.emit("fig4-qfunc", q);

  json min_abs = json::object();
  for (std::size_t k = 0; k < starts.size(); ++k) {
    double m = 1e300;
    for (double v : runs[k].series.scalar("M")) m = std::min(m, std::abs(v));
    min_abs[starts[k].first] = m;
  }
  ctx.report.summary["min_abs_M"] = min_abs;
  ctx.report.summary["state_codes"] = {"fock", "coherent", "cat"};
}

// Ensemble of coherent starts at theta02 = 2 pi k / 8 with spins along B_eff.
std::vector<QuantumRun> coherent_ensemble(const ExperimentConfig& cfg, const std::vector<double>& times,
                                          int members) {
  return parallel_map(members, [&](int k) {
    return run_quantum(cfg, coherent_start(cfg, kTwoPi * k / members, "field"), times,
                       {phase_observer()});
  });
}

// fig5: drift of the cavity phase against the bare and corrected predictions.
void fig5(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  const auto times = cfg.sample_times();
  const int members = 8;
  const auto runs = coherent_ensemble(cfg, times, members);
  const double n0 = start_alpha(cfg) * start_alpha(cfg);
  const double dw = delta_omega0_avg(n0, p, p.spin);

  CsvTable t({"t", "member", "theta02", "theta2", "drift", "predicted_drift"});
  std::vector<double> slopes;
  for (int k = 0; k < members; ++k) {
    ctx.absorb("coherent-" + std::to_string(k), runs[k]);
    const double theta02 = kTwoPi * k / members;
    const auto theta2 = unwrapped_phase(runs[k].series, theta02);
    std::vector<double> ts, drift;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double ta = times[i] * p.drive_period();
      const double d = theta2[i] - (p.omega * ta + theta02);
      t.add_row({times[i], static_cast<double>(k), theta02, theta2[i], d, dw * ta});
      if (times[i] <= 3.0 + 1e-9) {
        ts.push_back(ta);
        drift.push_back(d);
      }
    }
    slopes.push_back(least_squares_slope(ts, drift));
  }
  ctx.emit("fig5-phase-drift", t);
  double mean = 0.0;
  for (double s : slopes) mean += s;
  ctx.report.summary["delta_omega0"] = dw;
  ctx.report.summary["early_slopes"] = slopes;
  ctx.report.summary["early_slope_mean"] = mean / members;
  ctx.report.summary["early_window_periods"] = 3.0;
}

// fig6: lab-frame evolution compared with the rotating frame.
void fig6(Context& ctx) {
  ExperimentConfig cfg = ctx.cfg;
  if (!cfg.model.omega_q) cfg.model.omega_q = 100.0 * cfg.model.omega;
  const auto times = cfg.sample_times();
  const auto obs = standard_observers();
  const auto runs = parallel_map(2, [&](int i) {
    return run_quantum(cfg, cfg.initial, times, obs, i == 0 ? Frame::Rotating : Frame::Lab);
  });
  ctx.absorb("rotating", runs[0]);
  ctx.absorb("lab", runs[1]);
  ctx.emit("fig6-labframe-pn", pn_table(runs[1].series, cfg.model.n_max));
  CsvTable tv({"t", "tv_distance", "mean_n_lab", "mean_n_rotating"});
  double worst = 0.0;
  const auto& lab = runs[1].series.channels.at("P(n)");
  const auto& rot = runs[0].series.channels.at("P(n)");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double d = total_variation(lab[i], rot[i]);
    worst = std::max(worst, d);
    tv.add_row({times[i], d, runs[1].series.scalar("mean_n")[i], runs[0].series.scalar("mean_n")[i]});
  }
  ctx.emit("fig6-tv-distance", tv);
  ctx.report.summary["omega_q"] = *cfg.model.omega_q;
  ctx.report.summary["max_tv_distance"] = worst;
}

// fig7: semiclassical back-action ensemble against the quantum mean photon number.
void fig7(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  const double periods = std::min(cfg.periods, 14.0);
  const auto times = uniform_times(periods, cfg.samples_per_period);
  const QuantumRun run = run_quantum(cfg, fock_start(cfg), times, standard_observers());
  ctx.absorb("fock", run);

  const double n0 = cfg.initial.mean_photons();
  const double omega_eff = effective_cavity_frequency(p, n0, p.spin, cfg.correction);
  std::vector<double> abs_times;
  for (double t : times) abs_times.push_back(t * p.drive_period());
  const int members = 8;
  const auto ens = ensemble_run(EnsembleKind::Backaction, members, abs_times, n0, p, omega_eff, p.spin);

  std::vector<std::string> header{"t", "mean_n_quantum"};
  for (int k = 0; k < members; ++k) header.push_back("n" + std::to_string(k));
  header.push_back("n_mean");
  CsvTable t(header);
  const auto quantum = run.series.scalar("mean_n");
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> r{times[i], quantum[i]};
    double mean = 0.0;
    for (const auto& m : ens.members) {
      r.push_back(m.n[i]);
      mean += m.n[i];
    }
    mean /= members;
    r.push_back(mean);
    worst = std::max(worst, std::abs(mean - quantum[i]));
    t.add_row(r);
  }
  ctx.emit("fig7-semiclass-vs-quantum", t);
  ctx.report.summary["omega_eff"] = omega_eff;
  ctx.report.summary["max_abs_mean_deviation"] = worst;
}

// fig8: Q-function of an initially coherent state.
void fig8(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto times = integer_times(cfg.periods, 12.0);
  auto observers = standard_observers();
  observers.push_back(q_snapshot_observer());
  const QuantumRun run = run_quantum(cfg, coherent_start(cfg, 0.0, "x"), times, observers);
  ctx.absorb("coherent", run);
  const QGridSpec spec = QGridSpec::for_truncation(cfg.model.n_max, cfg.q_points);
  CsvTable q({"t", "re", "im", "Q"});
  CsvTable summary({"t", "mean_n", "PR", "S_ent", "abs_a"});
  const auto& states = run.series.channels.at("state");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const QuantumState psi = unflatten(states[i]);
    if (i == 0 || i + 1 == times.size()) add_q_rows(q, {times[i]}, husimi_q(reduced_cavity(psi), spec));
    summary.add_row({times[i], run.series.scalar("mean_n")[i], run.series.scalar("PR")[i],
                     run.series.scalar("S_ent")[i], std::abs(expect_annihilation(psi))});
  }
  ctx.emit("fig8-qfunc", q);
  ctx.emit("fig8-summary", summary);
}

// fig9: spin-cavity entanglement for Fock and coherent starts.
void fig9(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double periods = std::min(cfg.periods, 14.0);
  const auto times = uniform_times(periods, std::max(cfg.samples_per_period, 32));
  const auto obs = standard_observers();
  const std::vector<InitialState> starts = {fock_start(cfg), coherent_start(cfg, 0.0, "x")};
  const auto runs = parallel_map(2, [&](int i) { return run_quantum(cfg, starts[i], times, obs); });
  ctx.absorb("fock", runs[0]);
  ctx.absorb("coherent", runs[1]);
  CsvTable t({"t", "S_fock", "S_coherent"});
  double fock_first = 0.0, coherent_max = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double a = runs[0].series.scalar("S_ent")[i];
    const double b = runs[1].series.scalar("S_ent")[i];
    if (times[i] <= 1.0 + 1e-9) fock_first = std::max(fock_first, a);
    coherent_max = std::max(coherent_max, b);
    t.add_row({times[i], a, b});
  }
  ctx.emit("fig9-entanglement", t);
  ctx.report.summary["fock_max_first_period"] = fock_first;
  ctx.report.summary["coherent_max"] = coherent_max;
  ctx.report.summary["ln2"] = std::log(2.0);
}

// fig10: torus return distance, participation ratio and cat infidelity.
void fig10(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ModelParams& p = cfg.model;
  const auto times = cfg.sample_times();
  const int members = 8;

  const auto coherent = coherent_ensemble(cfg, times, members);
  auto cat_obs = Observer{"one_minus_fmax", [&](const QuantumState& s) {
                            const double hi = -3.0 + std::sqrt(9.0 + p.n_max);
                            return std::vector<double>{1.0 - cat_fidelity_max(reduced_cavity(s), 0.0, hi).f_max};
                          }};
  const auto pair = parallel_map(2, [&](int i) {
    return i == 0 ? run_quantum(cfg, fock_start(cfg), times, standard_observers())
                  : run_quantum(cfg, cat_start(cfg), times, {cat_obs});
  });
  const QuantumRun& fock = pair[0];
  const QuantumRun& cat = pair[1];
  ctx.absorb("fock", fock);
  ctx.absorb("cat", cat);

  std::vector<std::vector<double>> phases;
  std::vector<TorusPoint> starts;
  for (int k = 0; k < members; ++k) {
    ctx.absorb("coherent-" + std::to_string(k), coherent[k]);
    const double theta02 = kTwoPi * k / members;
    phases.push_back(unwrapped_phase(coherent[k].series, theta02));
    starts.push_back({p.theta01, theta02});
  }
  const auto pred = predict_almost_periods(cfg);

  CsvTable t({"t", "delta_theta", "delta_theta_linear", "PR", "one_minus_fmax"});
  const auto pr = fock.series.scalar("PR");
  const auto fid = cat.series.scalar("one_minus_fmax");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double ta = times[i] * p.drive_period();
    double worst = 0.0;
    for (int k = 0; k < members; ++k) {
      const TorusPoint now{p.theta01 + p.Omega * ta, phases[k][i]};
      worst = std::max(worst, torus_distance(now, starts[k]));
    }
    const double linear = ensemble_return_distance(ta, p.Omega, pred.omega_eff, starts);
    t.add_row({times[i], worst, linear, pr[i], fid[i]});
  }
  ctx.emit("fig10-rephasing-metrics", t);
  ctx.emit("fig10-almost-periods", almost_period_table(pred, p));

  json pr_at = json::object();
  for (const auto& a : pred.periods) {
    pr_at[std::to_string(a.h)] = pr[nearest_index(times, static_cast<double>(a.h))];
  }
  ctx.report.summary["PR_at_h"] = pr_at;
}

using Runner = std::function<void(Context&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"fig1-pn-heatmap", fig1},
      {"fig2-snapshots", fig2},
      {"fig3-semiclassical-ensembles", fig3},
      {"fig4-qfuncs-alignment", fig4},
      {"fig5-phase-drift", fig5},
      {"fig6-labframe", fig6},
      {"fig7-semiclass-vs-quantum", fig7},
      {"fig8-coherent-qfunc", fig8},
      {"fig9-entanglement", fig9},
      {"fig10-rephasing-metrics", fig10},
  };
  return r;
}

json certificate_json(const std::pair<std::string, ConvergenceCertificate>& c) {
  return {{"run", c.first},
          {"step", c.second.step},
          {"halving_change", c.second.halving_change},
          {"norm_drift", c.second.norm_drift},
          {"halvings", c.second.halvings}};
}

json config_json(const ExperimentConfig& c) {
  json model = {{"omega", c.model.omega},   {"Omega", c.model.Omega}, {"b_m", c.model.b_m},
                {"b_d", c.model.b_d},       {"b_0", c.model.b_0},     {"theta01", c.model.theta01},
                {"spin", c.model.spin},     {"n_max", c.model.n_max}};
  if (c.model.omega_q) model["omega_q"] = *c.model.omega_q;
  return {{"preset", c.preset},
          {"model", model},
          {"evolution",
           {{"dt_max", c.evolution.dt_max},
            {"tol_norm", c.evolution.tol_norm},
            {"scheme", to_string(c.evolution.scheme)},
            {"periods", c.periods},
            {"samples_per_period", c.samples_per_period},
            {"leakage_threshold", c.evolution.leakage_threshold},
            {"max_halvings", c.evolution.max_halvings},
            {"certify", c.certify}}},
          {"initial",
           {{"kind", to_string(c.initial.kind)},
            {"n0", c.initial.n0},
            {"alpha", c.initial.alpha},
            {"theta02", c.initial.theta02},
            {"spin_axis", c.initial.spin_axis},
            {"spin_sign", c.initial.spin_sign}}},
          {"ensemble", {{"n_theta", c.n_theta}}},
          {"prediction", {{"h_max", c.h_max}, {"correction", c.correction}}},
          {"output", {{"q_points", c.q_points}}},
          {"seed", c.seed}};
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

bool is_experiment(const std::string& name) {
  const auto names = experiment_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RunReport run_experiment(const std::string& name, const ExperimentConfig& cfg,
                         const std::filesystem::path& out_dir) {
  const auto it = std::find_if(registry().begin(), registry().end(),
                               [&](const auto& e) { return e.first == name; });
  if (it == registry().end()) throw ConfigError("unknown experiment '" + name + "'");
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.experiment = name;
  Context ctx{cfg, out_dir, report, {}};
  it->second(ctx);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (std::size_t i = 0; i < report.files.size(); ++i) {
    const CsvCheck check = validate_csv(report.files[i], ctx.headers[i]);
    json certs = json::array();
    for (const auto& c : report.certificates) certs.push_back(certificate_json(c));
    const json manifest = {{"experiment", name},
                           {"file", std::filesystem::path(report.files[i]).filename().string()},
                           {"columns", ctx.headers[i]},
                           {"rows", check.rows},
                           {"time_unit", "drive periods 2 pi / Omega"},
                           {"code_version", CAVBOOST_VERSION},
                           {"wall_seconds", report.wall_seconds},
                           {"leakage_max", report.leakage_max},
                           {"norm_drift_max", report.norm_drift_max},
                           {"convergence_certificates", certs},
                           {"summary", report.summary},
                           {"config", config_json(cfg)},
                           {"config_ini", to_ini(cfg)}};
    auto path = std::filesystem::path(report.files[i]);
    path.replace_extension(".json");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest '" + path.string() + "'");
    out << manifest.dump(2) << "\n";
  }
  return report;
}

}  // namespace cavboost
