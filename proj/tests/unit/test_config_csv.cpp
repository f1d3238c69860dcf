#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "doctest.h"

#include "cavboost/config.hpp"
#include "cavboost/csv.hpp"
#include "cavboost/errors.hpp"
#include "cavboost/observables.hpp"
#include "cavboost/semiclassics.hpp"

using namespace cavboost;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cavboost-unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("reference preset") {
    const ExperimentConfig c = preset("paper-fig1");
    CHECK(c.model.Omega == doctest::Approx(kGoldenRatio));
    CHECK(c.model.omega == 1.0);
    CHECK(c.model.b_m == 6.0);
    CHECK(c.model.b_d == 6.0);
    CHECK(c.model.b_0 == 1.5);
    CHECK(c.model.theta01 == doctest::Approx(1.5 * M_PI));
    CHECK(c.model.n_max == 64);
    CHECK(c.initial.kind == InitialKind::Fock);
    CHECK(c.initial.n0 == 10);
    CHECK(c.sample_times().size() == 129);
    CHECK_THROWS_AS(preset("nope"), ConfigError);
    CHECK(load_config("paper-fig1").model.n_max == 64);
  }

  TEST_CASE("overrides and unknown keys") {
    const ExperimentConfig c = parse_config("[model]\nb_0 = 0.5\n[initial]\nkind = coherent\nalpha = 3\n");
    CHECK(c.model.b_0 == 0.5);
    CHECK(c.initial.kind == InitialKind::Coherent);
    CHECK(c.initial.mean_photons() == doctest::Approx(9.0));
    CHECK_THROWS_AS(parse_config("[model]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("stray = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/does/not/exist.ini"), ConfigError);
  }

  TEST_CASE("invalid values are rejected") {
    CHECK_THROWS_AS(parse_config("[model]\nn_max = 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nb_0 = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[evolution]\ndt_max = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[evolution]\ncertify = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[evolution]\nscheme = euler\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nspin_axis = w\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nspin_sign = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nkind = coherent\nalpha = 7\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[ensemble]\nn_theta = 1\n"), ConfigError);
  }

  TEST_CASE("INI round trip") {
    ExperimentConfig c = parse_config(
        "[model]\nb_0 = 0.123456789012345678\nn_max = 40\n[evolution]\nperiods = 3.5\n"
        "certify = false\nscheme = midpoint\n[initial]\nkind = cat\nalpha = 2.5\n"
        "spin_axis = field\nspin_sign = -1\n[prediction]\ncorrection = off\nh_max = 30\n");
    const ExperimentConfig back = parse_config(to_ini(c));
    CHECK(back.model.b_0 == c.model.b_0);
    CHECK(back.model.n_max == 40);
    CHECK(back.model.omega_q == c.model.omega_q);
    CHECK(back.periods == 3.5);
    CHECK_FALSE(back.certify);
    CHECK(back.evolution.scheme == Scheme::Midpoint);
    CHECK(back.initial.kind == InitialKind::Cat);
    CHECK(back.initial.alpha == 2.5);
    CHECK(back.initial.spin_axis == "field");
    CHECK(back.initial.spin_sign == -1);
    CHECK_FALSE(back.correction);
    CHECK(back.h_max == 30);
    CHECK(to_ini(back) == to_ini(c));
  }

  TEST_CASE("initial state spin along the effective field") {
    ExperimentConfig c = parse_config("[initial]\nkind = coherent\nalpha = 3\nspin_axis = field\n");
    const QuantumState psi = initial_state(c);
    CHECK(psi.norm() == doctest::Approx(1.0));
    const FieldVector b = b_eff(c.model.theta01, 0.0, 9.0, c.model);
    const Eigen::Matrix2cd r = reduced_spin(psi);
    const FieldVector s{r(0, 1).real(), -r(0, 1).imag(), 0.5 * (r(0, 0) - r(1, 1)).real()};
    CHECK(s.dot(b) / b.norm() == doctest::Approx(0.5).epsilon(1e-9));
  }

  TEST_CASE("CSV numbers round-trip exactly") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    CsvTable t({"a", "b", "c"});
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 50; ++i) {
      rows.push_back({u(rng), u(rng) * 1e-12, std::ldexp(u(rng), 200)});
      t.add_row(rows.back());
    }
    t.add_row(std::vector<double>{0.1, -0.0, std::numeric_limits<double>::min()});
    rows.push_back({0.1, -0.0, std::numeric_limits<double>::min()});
    const auto path = scratch("roundtrip.csv").string();
    t.write(path);
    const CsvCheck check = validate_csv(path, {"a", "b", "c"});
    CHECK(check.rows == rows.size());
    CHECK(check.columns == 3);
    const CsvData data = read_csv(path);
    REQUIRE(data.rows.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int j = 0; j < 3; ++j) CHECK(data.rows[i][j] == rows[i][j]);
  }

  TEST_CASE("CSV shape errors") {
    CsvTable t({"x", "y"});
    CHECK_THROWS_AS(t.add_row(std::vector<double>{1.0}), ConfigError);
    t.add_row(std::vector<double>{1.0, 2.0});
    const auto path = scratch("shape.csv").string();
    t.write(path);
    CHECK_THROWS_AS(validate_csv(path, {"x", "z"}), ConfigError);
    CHECK_THROWS_AS(validate_csv(path, {"x"}), ConfigError);
    std::ofstream(path, std::ios::app) << "1,2,3\n";
    CHECK_THROWS_AS(validate_csv(path, {"x", "y"}), ConfigError);
    CHECK(format_number(0.1) == "0.10000000000000001");
  }
}
