#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cavboost/errors.hpp"
#include "cavboost/experiments.hpp"

using namespace cavboost;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cavboost-unit" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig quick() {
  ExperimentConfig c = preset("paper-fig1");
  c.periods = 1.0;
  c.samples_per_period = 4;
  c.certify = false;
  c.model.n_max = 32;
  return c;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("registry") {
    const auto names = experiment_names();
    CHECK(names.size() == 10);
    CHECK(is_experiment("fig1-pn-heatmap"));
    CHECK_FALSE(is_experiment("fig11"));
    CHECK_THROWS_AS(run_experiment("fig11", quick(), scratch("none")), ConfigError);
  }

  TEST_CASE("runs are deterministic and write manifests") {
    const auto a = scratch("det-a"), b = scratch("det-b");
    const RunReport ra = run_experiment("fig1-pn-heatmap", quick(), a);
    const RunReport rb = run_experiment("fig1-pn-heatmap", quick(), b);
    REQUIRE(ra.files.size() == 3);
    REQUIRE(rb.files.size() == 3);
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
      CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
      fs::path manifest = ra.files[i];
      manifest.replace_extension(".json");
      CHECK(fs::exists(manifest));
      const auto j = nlohmann::json::parse(slurp(manifest));
      CHECK(j.at("experiment").get<std::string>() == "fig1-pn-heatmap");
      CHECK(j.contains("config_ini"));
      CHECK(j.contains("code_version"));
    }

    const CsvData pn = read_csv(ra.files[0]);
    CHECK(pn.header.size() == 34);
    CHECK(pn.rows.size() == 5);
    for (const auto& row : pn.rows) {
      double s = 0.0;
      for (std::size_t k = 1; k < row.size(); ++k) s += row[k];
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
  }

  TEST_CASE("prediction without coupling gives the bare ratio") {
    ExperimentConfig c = preset("paper-fig1");
    c.model.b_0 = 0.0;
    const AlmostPeriodPrediction pred = predict_almost_periods(c);
    CHECK(pred.delta_omega0 == 0.0);
    CHECK(pred.ratio == doctest::Approx(c.model.Omega / c.model.omega));

    c.model.b_0 = 1.5;
    c.correction = false;
    CHECK(predict_almost_periods(c).ratio == doctest::Approx(kGoldenRatio));
    const auto text = format_prediction(predict_almost_periods(c));
    CHECK(text.find("13") != std::string::npos);
  }

  TEST_CASE("small helpers") {
    CHECK(total_variation({0.5, 0.5}, {1.0, 0.0}) == doctest::Approx(0.5));
    CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
    CHECK(nearest_index({0.0, 0.5, 1.0}, 0.7) == 1);
    const auto t = uniform_times(2.0, 4);
    CHECK(t.size() == 9);
    CHECK(t.back() == 2.0);
  }
}
