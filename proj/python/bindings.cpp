#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cavboost/config.hpp"
#include "cavboost/errors.hpp"
#include "cavboost/experiments.hpp"
#include "cavboost/quasiperiodic.hpp"
#include "cavboost/semiclassics.hpp"

namespace py = pybind11;
using namespace cavboost;

namespace {

py::array_t<double> to_array(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size(), m = rows.empty() ? 0 : rows.front().size();
  py::array_t<double> out({n, m});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) v(i, j) = rows[i][j];
  return out;
}

py::tuple as_tuple(const FieldVector& b) { return py::make_tuple(b.x, b.y, b.z); }

// Quantum evolution of cfg.initial with the standard observers.
py::dict simulate(const ExperimentConfig& cfg, std::optional<std::vector<double>> times, bool lab) {
  cfg.validate();
  const auto t = times ? *times : cfg.sample_times();
  QuantumRun run;
  {
    py::gil_scoped_release release;
    run = run_quantum(cfg, cfg.initial, t, standard_observers(), lab ? Frame::Lab : Frame::Rotating);
  }
  py::dict d;
  d["t"] = py::array_t<double>(t.size(), t.data());
  d["pn"] = to_array(run.series.channels.at("P(n)"));
  for (const char* name : {"mean_n", "PR", "S_ent", "tail"}) {
    const auto s = run.series.scalar(name);
    d[name] = py::array_t<double>(s.size(), s.data());
  }
  d["leakage_max"] = run.series.leakage_max;
  d["norm_drift_max"] = run.series.norm_drift_max;
  if (run.certificate) {
    py::dict c;
    c["step"] = run.certificate->step;
    c["halving_change"] = run.certificate->halving_change;
    c["norm_drift"] = run.certificate->norm_drift;
    c["halvings"] = run.certificate->halvings;
    d["certificate"] = c;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_cavboost, m) {
  m.doc() = "Driven spin-cavity boosting simulator";
  m.attr("__version__") = CAVBOOST_VERSION;

  auto base = py::register_exception<Error>(m, "CavboostError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto guard = py::register_exception<PhysicsGuardError>(m, "PhysicsGuardError", base.ptr());
  py::register_exception<LeakageError>(m, "LeakageError", guard.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", guard.ptr());
  py::register_exception<SingularFieldError>(m, "SingularFieldError", guard.ptr());
  py::register_exception<DegeneracyError>(m, "DegeneracyError", guard.ptr());
  py::register_exception<UndefinedPhaseError>(m, "UndefinedPhaseError", guard.ptr());
  py::register_exception<UnderflowError>(m, "UnderflowError", guard.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_static("reference", &ModelParams::reference)
      .def_readwrite("omega", &ModelParams::omega)
      .def_readwrite("Omega", &ModelParams::Omega)
      .def_readwrite("b_m", &ModelParams::b_m)
      .def_readwrite("b_d", &ModelParams::b_d)
      .def_readwrite("b_0", &ModelParams::b_0)
      .def_readwrite("theta01", &ModelParams::theta01)
      .def_readwrite("spin", &ModelParams::spin)
      .def_readwrite("n_max", &ModelParams::n_max)
      .def_readwrite("omega_q", &ModelParams::omega_q)
      .def_property_readonly("drive_period", &ModelParams::drive_period)
      .def("validate", &ModelParams::validate);

  py::class_<InitialState>(m, "InitialState")
      .def(py::init<>())
      .def_property(
          "kind", [](const InitialState& s) { return to_string(s.kind); },
          [](InitialState& s, const std::string& k) {
            s = parse_config("[initial]\nkind = " + k + "\n").initial;
          })
      .def_readwrite("n0", &InitialState::n0)
      .def_readwrite("alpha", &InitialState::alpha)
      .def_readwrite("theta02", &InitialState::theta02)
      .def_readwrite("spin_axis", &InitialState::spin_axis)
      .def_readwrite("spin_sign", &InitialState::spin_sign)
      .def("mean_photons", &InitialState::mean_photons);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init([] { return preset("paper-fig1"); }))
      .def_readwrite("preset", &ExperimentConfig::preset)
      .def_readwrite("model", &ExperimentConfig::model)
      .def_readwrite("initial", &ExperimentConfig::initial)
      .def_readwrite("periods", &ExperimentConfig::periods)
      .def_readwrite("samples_per_period", &ExperimentConfig::samples_per_period)
      .def_readwrite("certify", &ExperimentConfig::certify)
      .def_readwrite("n_theta", &ExperimentConfig::n_theta)
      .def_readwrite("h_max", &ExperimentConfig::h_max)
      .def_readwrite("correction", &ExperimentConfig::correction)
      .def_readwrite("q_points", &ExperimentConfig::q_points)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def("validate", &ExperimentConfig::validate)
      .def("sample_times", &ExperimentConfig::sample_times)
      .def("to_ini", [](const ExperimentConfig& c) { return to_ini(c); });

  m.def("preset", &preset, py::arg("name") = "paper-fig1");
  m.def("preset_names", &preset_names);
  m.def("load_config", &load_config, py::arg("path_or_preset"));
  m.def("parse_config", &parse_config, py::arg("ini_text"));

  m.def("b_eff", [](double t1, double t2, double n, const ModelParams& p) { return as_tuple(b_eff(t1, t2, n, p)); },
        py::arg("theta1"), py::arg("theta2"), py::arg("n"), py::arg("params"));
  m.def("berry_curvature", &berry_curvature, py::arg("theta1"), py::arg("theta2"), py::arg("n"),
        py::arg("params"), py::arg("spin") = 0.5);
  m.def("ndot_adiabatic", &ndot_adiabatic, py::arg("theta1"), py::arg("theta2"), py::arg("n"),
        py::arg("params"), py::arg("spin") = 0.5);
  m.def(
      "chern_number",
      [](const ModelParams& p, double n, double spin, int grid) {
        const ChernResult r = chern_number(p, n, spin, grid);
        py::dict d;
        d["chern"] = r.chern;
        d["integral"] = r.integral;
        d["residual"] = r.residual;
        return d;
      },
      py::arg("params"), py::arg("n"), py::arg("spin") = 0.5, py::arg("grid") = 256);
  m.def("ndot_torus_average", &ndot_torus_average, py::arg("params"), py::arg("n"), py::arg("spin") = 0.5,
        py::arg("grid") = 256);
  m.def("delta_omega0_avg", &delta_omega0_avg, py::arg("n"), py::arg("params"), py::arg("spin") = 0.5,
        py::arg("grid") = 256);
  m.def("effective_cavity_frequency", &effective_cavity_frequency, py::arg("params"), py::arg("n0"),
        py::arg("spin") = 0.5, py::arg("corrected") = true);

  py::class_<Fraction>(m, "Fraction")
      .def_readonly("h", &Fraction::h)
      .def_readonly("k", &Fraction::k)
      .def("__repr__", [](const Fraction& f) { return std::to_string(f.h) + "/" + std::to_string(f.k); });

  py::class_<CFExpansion>(m, "CFExpansion")
      .def_readonly("beta", &CFExpansion::beta)
      .def_readonly("coeffs", &CFExpansion::coeffs)
      .def_readonly("convergents", &CFExpansion::convergents)
      .def_readonly("exact", &CFExpansion::exact)
      .def_property_readonly("semiconvergents", [](const CFExpansion& cf) {
        std::vector<Fraction> out;
        for (const auto& s : cf.semiconvergents) out.push_back({s.h, s.k});
        return out;
      });

  py::class_<AlmostPeriod>(m, "AlmostPeriod")
      .def_readonly("T", &AlmostPeriod::T)
      .def_readonly("h", &AlmostPeriod::h)
      .def_readonly("k", &AlmostPeriod::k)
      .def_property_readonly("kind", [](const AlmostPeriod& a) { return to_string(a.kind); })
      .def("__repr__", [](const AlmostPeriod& a) {
        return "AlmostPeriod(h=" + std::to_string(a.h) + ", k=" + std::to_string(a.k) + ", kind=" +
               to_string(a.kind) + ")";
      });

  m.def("continued_fraction", &continued_fraction, py::arg("beta"), py::arg("max_terms") = 20,
        py::arg("tol") = 1e-9);
  m.def("almost_periods", &almost_periods, py::arg("Omega"), py::arg("omega_eff"), py::arg("h_max"));
  m.def("best_approx_check", py::overload_cast<const CFExpansion&, int>(&best_approx_check), py::arg("cf"),
        py::arg("N"));

  m.def(
      "predict_almost_periods",
      [](const ExperimentConfig& cfg) {
        const AlmostPeriodPrediction p = predict_almost_periods(cfg);
        py::dict d;
        d["n0"] = p.n0;
        d["delta_omega0"] = p.delta_omega0;
        d["omega_eff"] = p.omega_eff;
        d["ratio"] = p.ratio;
        d["cf"] = p.cf;
        d["periods"] = p.periods;
        return d;
      },
      py::arg("config"));

  m.def("experiment_names", &experiment_names);
  m.def(
      "run_experiment",
      [](const std::string& name, const ExperimentConfig& cfg, const std::filesystem::path& out) {
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(name, cfg, out);
        }
        py::dict d;
        d["experiment"] = r.experiment;
        d["files"] = r.files;
        d["leakage_max"] = r.leakage_max;
        d["norm_drift_max"] = r.norm_drift_max;
        d["wall_seconds"] = r.wall_seconds;
        d["summary_json"] = r.summary.dump();
        return d;
      },
      py::arg("name"), py::arg("config"), py::arg("out_dir"));

  m.def("simulate", &simulate, py::arg("config"), py::arg("times") = py::none(), py::arg("lab_frame") = false,
        "Evolve config.initial and return P(n), mean_n, PR, S_ent and tail at the sample times "
        "(units of the drive period).");
}
