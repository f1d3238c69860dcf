#include "cavboost/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cavboost/errors.hpp"
#include "cavboost/semiclassics.hpp"

namespace cavboost {

namespace pt = boost::property_tree;

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::Fock: return "fock";
    case InitialKind::Coherent: return "coherent";
    case InitialKind::Cat: return "cat";
  }
  return "?";
}

namespace {

InitialKind parse_kind(const std::string& s) {
  if (s == "fock") return InitialKind::Fock;
  if (s == "coherent") return InitialKind::Coherent;
  if (s == "cat") return InitialKind::Cat;
  throw ConfigError("unknown initial state kind '" + s + "' (expected fock, coherent or cat)");
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"omega", "Omega", "b_m", "b_d", "b_0", "theta01", "spin", "n_max", "omega_q"}},
      {"evolution",
       {"dt_max", "tol_norm", "scheme", "periods", "samples_per_period", "leakage_threshold",
        "max_halvings", "certify"}},
      {"initial", {"kind", "n0", "alpha", "theta02", "spin_axis", "spin_sign"}},
      {"ensemble", {"n_theta"}},
      {"prediction", {"h_max", "correction"}},
      {"output", {"q_points"}},
  };
  return keys;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& path, T fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(path, '.'));
  if (!node) return fallback;
  const auto value = node->get_value_optional<T>();
  if (!value) throw ConfigError("cannot parse value '" + node->data() + "' of key " + path);
  return *value;
}

bool get_bool(const pt::ptree& tree, const std::string& path, bool fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(path, '.'));
  if (!node) return fallback;
  std::string v = node->data();
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("cannot parse boolean '" + node->data() + "' of key " + path);
}

void check_keys(const pt::ptree& tree) {
  for (const auto& [name, child] : tree) {
    if (child.empty()) {
      if (name != "preset") throw ConfigError("unknown top-level key '" + name + "'");
      continue;
    }
    const auto it = schema().find(name);
    if (it == schema().end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, value] : child) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
    }
  }
}

ExperimentConfig from_tree(const pt::ptree& tree) {
  check_keys(tree);
  ExperimentConfig c = preset(tree.get<std::string>("preset", "paper-fig1"));
  ModelParams& m = c.model;
  m.omega = get(tree, "model.omega", m.omega);
  m.Omega = get(tree, "model.Omega", m.Omega);
  m.b_m = get(tree, "model.b_m", m.b_m);
  m.b_d = get(tree, "model.b_d", m.b_d);
  m.b_0 = get(tree, "model.b_0", m.b_0);
  m.theta01 = get(tree, "model.theta01", m.theta01);
  m.spin = get(tree, "model.spin", m.spin);
  m.n_max = get(tree, "model.n_max", m.n_max);
  if (tree.get_child_optional(pt::ptree::path_type("model.omega_q", '.'))) {
    m.omega_q = get(tree, "model.omega_q", 0.0);
  }

  EvolutionConfig& e = c.evolution;
  e.dt_max = get(tree, "evolution.dt_max", e.dt_max);
  e.tol_norm = get(tree, "evolution.tol_norm", e.tol_norm);
  e.scheme = parse_scheme(get<std::string>(tree, "evolution.scheme", to_string(e.scheme)));
  e.leakage_threshold = get(tree, "evolution.leakage_threshold", e.leakage_threshold);
  e.max_halvings = get(tree, "evolution.max_halvings", e.max_halvings);
  c.periods = get(tree, "evolution.periods", c.periods);
  c.samples_per_period = get(tree, "evolution.samples_per_period", c.samples_per_period);
  c.certify = get_bool(tree, "evolution.certify", c.certify);

  InitialState& i = c.initial;
  i.kind = parse_kind(get<std::string>(tree, "initial.kind", to_string(i.kind)));
  i.n0 = get(tree, "initial.n0", i.n0);
  i.alpha = get(tree, "initial.alpha", i.alpha);
  i.theta02 = get(tree, "initial.theta02", i.theta02);
  i.spin_axis = get<std::string>(tree, "initial.spin_axis", i.spin_axis);
  i.spin_sign = get(tree, "initial.spin_sign", i.spin_sign);

  c.n_theta = get(tree, "ensemble.n_theta", c.n_theta);
  c.h_max = get(tree, "prediction.h_max", c.h_max);
  c.correction = get_bool(tree, "prediction.correction", c.correction);
  c.q_points = get(tree, "output.q_points", c.q_points);
  c.validate();
  return c;
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double InitialState::mean_photons() const {
  return kind == InitialKind::Fock ? static_cast<double>(n0) : alpha * alpha;
}

void ExperimentConfig::validate() const {
  model.validate();
  evolution.validate();
  if (!(periods > 0.0)) throw ConfigError("periods must be positive");
  if (samples_per_period < 1) throw ConfigError("samples_per_period must be at least 1");
  if (n_theta < 2) throw ConfigError("ensemble n_theta must be at least 2");
  if (h_max < 1) throw ConfigError("prediction h_max must be at least 1");
  if (q_points < 3) throw ConfigError("output q_points must be at least 3");
  if (initial.spin_sign != 1 && initial.spin_sign != -1) throw ConfigError("spin_sign must be +1 or -1");
  static const std::set<std::string> axes = {"x", "y", "z", "field"};
  if (!axes.count(initial.spin_axis))
    throw ConfigError("spin_axis must be one of x, y, z, field");
  if (initial.kind == InitialKind::Fock) {
    if (initial.n0 < 0 || initial.n0 > model.n_max)
      throw ConfigError("initial Fock number outside 0..n_max");
  } else {
    const double a = std::abs(initial.alpha);
    if (a * a + 6.0 * a > model.n_max)
      throw ConfigError("initial state mass |alpha|^2 + 6|alpha| exceeds n_max");
  }
}

std::vector<double> ExperimentConfig::sample_times() const {
  if (!evolution.sample_times.empty()) return evolution.sample_times;
  return EvolutionConfig::default_samples(periods, samples_per_period);
}

std::vector<std::string> preset_names() { return {"paper-fig1"}; }

ExperimentConfig preset(const std::string& name) {
  if (name != "paper-fig1") throw ConfigError("unknown preset '" + name + "'");
  ExperimentConfig c;
  c.preset = name;
  c.model = ModelParams::reference();
  c.model.omega_q = 100.0;
  c.initial = InitialState{};
  return c;
}

ExperimentConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return from_tree(tree);
}

ExperimentConfig load_config(const std::string& path_or_preset) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), path_or_preset) != names.end() &&
      !std::filesystem::exists(path_or_preset)) {
    return preset(path_or_preset);
  }
  std::ifstream in(path_or_preset);
  if (!in) throw ConfigError("cannot open config file '" + path_or_preset + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "preset = " << c.preset << "\n\n[model]\n"
     << "omega = " << format(c.model.omega) << "\n"
     << "Omega = " << format(c.model.Omega) << "\n"
     << "b_m = " << format(c.model.b_m) << "\n"
     << "b_d = " << format(c.model.b_d) << "\n"
     << "b_0 = " << format(c.model.b_0) << "\n"
     << "theta01 = " << format(c.model.theta01) << "\n"
     << "spin = " << format(c.model.spin) << "\n"
     << "n_max = " << c.model.n_max << "\n";
  if (c.model.omega_q) os << "omega_q = " << format(*c.model.omega_q) << "\n";
  os << "\n[evolution]\n"
     << "dt_max = " << format(c.evolution.dt_max) << "\n"
     << "tol_norm = " << format(c.evolution.tol_norm) << "\n"
     << "scheme = " << to_string(c.evolution.scheme) << "\n"
     << "periods = " << format(c.periods) << "\n"
     << "samples_per_period = " << c.samples_per_period << "\n"
     << "leakage_threshold = " << format(c.evolution.leakage_threshold) << "\n"
     << "max_halvings = " << c.evolution.max_halvings << "\n"
     << "certify = " << (c.certify ? "true" : "false") << "\n"
     << "\n[initial]\n"
     << "kind = " << to_string(c.initial.kind) << "\n"
     << "n0 = " << c.initial.n0 << "\n"
     << "alpha = " << format(c.initial.alpha) << "\n"
     << "theta02 = " << format(c.initial.theta02) << "\n"
     << "spin_axis = " << c.initial.spin_axis << "\n"
     << "spin_sign = " << c.initial.spin_sign << "\n"
     << "\n[ensemble]\nn_theta = " << c.n_theta << "\n"
     << "\n[prediction]\nh_max = " << c.h_max << "\n"
     << "correction = " << (c.correction ? "true" : "false") << "\n"
     << "\n[output]\nq_points = " << c.q_points << "\n";
  return os.str();
}

QuantumState initial_state(const InitialState& init, const ModelParams& p) {
  const Complex alpha = std::polar(init.alpha, -init.theta02);
  CavityState cavity;
  switch (init.kind) {
    case InitialKind::Fock: cavity = make_fock(init.n0, p); break;
    case InitialKind::Coherent: cavity = make_coherent(alpha, p); break;
    case InitialKind::Cat: cavity = make_cat(init.alpha, p); break;
  }
  FieldVector axis{1.0, 0.0, 0.0};
  if (init.spin_axis == "y") axis = {0.0, 1.0, 0.0};
  if (init.spin_axis == "z") axis = {0.0, 0.0, 1.0};
  if (init.spin_axis == "field") {
    const double theta2 = init.kind == InitialKind::Coherent ? init.theta02 : 0.0;
    const double n = init.kind == InitialKind::Coherent ? init.mean_photons() : 0.0;
    axis = b_eff(p.theta01, theta2, n, p);
  }
  return with_spin(cavity, axis, init.spin_sign);
}

QuantumState initial_state(const ExperimentConfig& cfg) {
  return initial_state(cfg.initial, cfg.model);
}

}  // namespace cavboost
