#include <cmath>

#include "doctest.h"

#include "cavboost/errors.hpp"
#include "cavboost/linalg.hpp"
#include "cavboost/observables.hpp"
#include "cavboost/propagator.hpp"

using namespace cavboost;

namespace {

ModelParams small(int n_max) {
  ModelParams p = ModelParams::reference();
  p.n_max = n_max;
  return p;
}

// Piecewise-constant propagation with a dense exponential per step,
// sampling H at the step midpoint.
CVector brute_force(const ModelParams& p, const CVector& psi0, double t1, int steps) {
  CVector psi = psi0;
  const double dt = t1 / steps;
  for (int k = 0; k < steps; ++k) {
    const CMatrix h = hamiltonian_rotating((k + 0.5) * dt, p);
    psi = expm(Complex(0.0, -dt) * h) * psi;
  }
  return psi;
}

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("scheme names") {
    CHECK(parse_scheme("cf4") == Scheme::Magnus4);
    CHECK(parse_scheme("magnus4-dense") == Scheme::Magnus4Dense);
    CHECK(to_string(Scheme::Midpoint) == "midpoint");
    CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);
  }

  TEST_CASE("config validation") {
    EvolutionConfig c;
    c.sample_times = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sample_times = {0.0, 1.0};
    c.dt_max = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    const auto d = EvolutionConfig::default_samples();
    CHECK(d.size() == 129);
    CHECK(d.back() == 16.0);
  }

  TEST_CASE("free rotation of a coherent state") {
    ModelParams p = small(40);
    p.b_m = p.b_d = p.b_0 = 0.0;
    const Complex alpha(2.0, -1.0);
    const QuantumState psi0 = with_spin(make_coherent(alpha, p), {1, 0, 0}, 1);
    const Hamiltonian h = rotating_frame_hamiltonian(p);
    EvolutionConfig cfg;
    for (double t : {0.5, 3.0, 11.0}) {
      const QuantumState psi = evolve(psi0, h, 0.0, t, cfg);
      const Complex expected = expect_annihilation(psi0) * std::polar(1.0, -p.omega * t);
      CHECK(std::abs(expect_annihilation(psi) - expected) < 1e-8);
    }
  }

  TEST_CASE("constant Hamiltonian matches the exponential oracle") {
    ModelParams p = small(8);
    p.b_d = 0.0;  // removes the time dependence
    const QuantumState psi0 = with_spin(make_fock(3, p), {0.3, 0.1, 1.0}, 1);
    const Hamiltonian h = rotating_frame_hamiltonian(p);
    EvolutionConfig cfg;
    cfg.leakage_threshold = 1.0;
    const double t = 2.7;
    const QuantumState psi = evolve(psi0, h, 0.0, t, cfg);
    const CVector ref = expm(Complex(0.0, -t) * hamiltonian_rotating(0.0, p)) * psi0.amps;
    CHECK((psi.amps - ref).norm() < 1e-8);
  }

  TEST_CASE("all schemes agree with a brute-force fine-step oracle") {
    const ModelParams p = small(8);
    const QuantumState psi0 = with_spin(make_fock(2, p), {1, 0, 0}, 1);
    const Hamiltonian h = rotating_frame_hamiltonian(p);
    const double t1 = p.drive_period();
    const CVector ref = brute_force(p, psi0.amps, t1, static_cast<int>(std::round(1e4)));
    for (Scheme s : {Scheme::Magnus4, Scheme::Magnus4Dense}) {
      const QuantumState psi = evolve_with_step(psi0, h, 0.0, t1, t1 / 256.0, s);
      CHECK((psi.amps - ref).norm() < 1e-6);
    }
    const QuantumState mid = evolve_with_step(psi0, h, 0.0, t1, t1 / 4096.0, Scheme::Midpoint);
    CHECK((mid.amps - ref).norm() < 1e-5);
  }

  TEST_CASE("unitarity over 16 drive periods") {
    const ModelParams p = small(64);
    const QuantumState psi0 = with_spin(make_fock(10, p), {1, 0, 0}, 1);
    EvolutionConfig cfg;
    cfg.sample_times = EvolutionConfig::default_samples(16.0, 2);
    const auto series = evolve_observed(psi0, rotating_frame_hamiltonian(p), cfg,
                                        {{"norm", [](const QuantumState& s) {
                                            return std::vector<double>{s.norm()};
                                          }}});
    for (double n : series.scalar("norm")) CHECK(std::abs(n - 1.0) < 1e-9);
    CHECK(series.norm_drift_max < 1e-9);
  }

  TEST_CASE("forward then backward returns the initial state") {
    const ModelParams p = small(40);
    const QuantumState psi0 = with_spin(make_fock(10, p), {1, 0, 0}, 1);
    const Hamiltonian h = rotating_frame_hamiltonian(p);
    const double t1 = 4.0 * p.drive_period();
    const double step = p.drive_period() / 256.0;
    const QuantumState fwd = evolve_with_step(psi0, h, 0.0, t1, step, Scheme::Magnus4);
    const QuantumState back = evolve_with_step(fwd, h, t1, 0.0, step, Scheme::Magnus4);
    CHECK((back.amps - psi0.amps).norm() < 1e-6);
    CHECK(back.time == 0.0);
  }

  TEST_CASE("convergence certificate") {
    const ModelParams p = small(40);
    const QuantumState psi0 = with_spin(make_fock(10, p), {1, 0, 0}, 1);
    EvolutionConfig cfg;
    const auto [psi, cert] =
        evolve_certified(psi0, rotating_frame_hamiltonian(p), 0.0, 2.0 * p.drive_period(), cfg);
    CHECK(cert.halving_change < 10.0 * cfg.tol_norm);
    CHECK(cert.norm_drift < cfg.tol_norm);
    CHECK(cert.halvings >= 1);

    EvolutionConfig strict = cfg;
    strict.tol_norm = 1e-30;
    strict.max_halvings = 1;
    CHECK_THROWS_AS(evolve_certified(psi0, rotating_frame_hamiltonian(p), 0.0, p.drive_period(), strict),
                    ConvergenceError);
  }

  TEST_CASE("leakage guard trips on a small truncation") {
    const ModelParams p = small(14);
    const QuantumState psi0 = with_spin(make_fock(10, p), {1, 0, 0}, 1);
    EvolutionConfig cfg;
    CHECK_THROWS_AS(evolve(psi0, rotating_frame_hamiltonian(p), 0.0, 3.0 * p.drive_period(), cfg),
                    LeakageError);
  }

  TEST_CASE("observed series at t = 0 equals observables of the initial state") {
    const ModelParams p = small(30);
    const QuantumState psi0 = with_spin(make_coherent(2.0, p), {1, 0, 0}, 1);
    EvolutionConfig cfg;
    cfg.sample_times = {0.0};
    const auto series = evolve_observed(
        psi0, rotating_frame_hamiltonian(p), cfg,
        {{"P(n)", [](const QuantumState& s) { return fock_distribution(s); }}});
    const auto expected = fock_distribution(psi0);
    const auto& row = series.channels.at("P(n)").front();
    REQUIRE(row.size() == expected.size());
    for (std::size_t i = 0; i < row.size(); ++i) CHECK(row[i] == expected[i]);
  }

  TEST_CASE("P(n) rows sum to one over 128 samples") {
    const ModelParams p = small(64);
    const QuantumState psi0 = with_spin(make_fock(10, p), {1, 0, 0}, 1);
    EvolutionConfig cfg;
    cfg.sample_times = EvolutionConfig::default_samples();
    const auto series = evolve_observed(
        psi0, rotating_frame_hamiltonian(p), cfg,
        {{"P(n)", [](const QuantumState& s) { return fock_distribution(s); }}});
    REQUIRE(series.channels.at("P(n)").size() == 129);
    for (const auto& row : series.channels.at("P(n)")) {
      double s = 0.0;
      for (double v : row) s += v;
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
  }
}
