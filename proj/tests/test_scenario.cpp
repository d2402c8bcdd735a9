#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gaussdyn/scenario.hpp"
#include "oracles.hpp"

using namespace gaussdyn;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(GAUSSDYN_SOURCE_DIR) / "scenarios";

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("gaussdyn_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text,
                                           std::vector<std::string>* header) {
  std::istringstream in(text);
  std::string line;
  REQUIRE(std::getline(in, line));
  if (header) {
    header->clear();
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("scenario loading and validation") {
  SUBCASE("all shipped scenarios parse") {
    for (const auto& entry : fs::directory_iterator(kScenarios))
      CHECK_NOTHROW(load_scenario(entry.path()));
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_scenario(kScenarios / "nope.json"),
                    ScenarioParseError);
  }
  SUBCASE("rejects unknown models, bad states, duplicate paths") {
    json base = {
        {"hamiltonian", {{"model", "oscillator"},
                         {"params", {{"omega", 2.0}, {"nu", 1.0}}}}},
        {"initial_state", {{"n_modes", 1},
                           {"mean", {0.0, 0.0}},
                           {"cov", {{0.5, 0.0}, {0.0, 0.5}}}}},
        {"integrator", {{"t_max", 1.0}}}};
    json bad_model = base;
    bad_model["hamiltonian"]["model"] = "pendulum";
    CHECK_THROWS_AS(scenario_from_json(bad_model), ScenarioParseError);

    json bad_state = base;
    bad_state["initial_state"]["cov"] = {{0.1, 0.0}, {0.0, 0.1}};
    CHECK_THROWS_AS(scenario_from_json(bad_state), ScenarioParseError);

    json dup = base;
    dup["outputs"] = {{{"kind", "trajectory"}, {"path", "x.csv"}},
                      {{"kind", "energy"}, {"path", "x.csv"}}};
    CHECK_THROWS_AS(scenario_from_json(dup), ScenarioParseError);

    json mismatch = base;
    mismatch["hamiltonian"] = {{"model", "frequency_converter"},
                               {"params", {{"omega1", 2.0}, {"omega2", 1.0},
                                           {"omega", 1.0}, {"kappa", 1.0}}}};
    CHECK_THROWS_AS(scenario_from_json(mismatch), ScenarioParseError);
  }
  SUBCASE("parameter-record initial states") {
    const Scenario sc = load_scenario(kScenarios / "thermal_beta1.json");
    CHECK(sc.initial_state.n_modes == 1);
    CHECK(sc.initial_state.cov(0, 0) ==
          doctest::Approx(0.5 / std::tanh(0.5)).epsilon(1e-12));
  }
  SUBCASE("two-mode parameter-record initial states") {
    json j = {
        {"hamiltonian",
         {{"model", "frequency_converter"},
          {"params",
           {{"omega1", 2.0}, {"omega2", 1.0}, {"omega", 1.0}, {"kappa", 1.0}}}}},
        {"initial_state",
         {{"params_bipartite",
           {{"a11", {1.25, 0.0}}, {"a22", {0.625, 0.0}}, {"a12", {0.0, 0.0}},
            {"a14", {0.0, 0.0}}, {"a13", 1.5}, {"a24", 0.75}}}}},
        {"integrator", {{"t_max", 1.0}}}};
    const Scenario sc = scenario_from_json(j);
    const Matrix expect = converter_invariant_cov(1.0, 2.0, 1.0);
    CHECK((sc.initial_state.cov - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("evolve artifacts") {
  const fs::path dir = temp_dir("evolve");
  const Scenario sc = load_scenario(kScenarios / "fig1.json");
  REQUIRE(run_evolve(sc, dir) == 0);

  std::vector<std::string> header;
  const auto rows = parse_csv(slurp(dir / "fig1_trajectory.csv"), &header);
  REQUIRE(header.size() == 9);
  CHECK(header[0] == "t");
  CHECK(header[1] == "mean_1");
  CHECK(header[3] == "cov_11");
  CHECK(header[4] == "cov_12");
  CHECK(header[5] == "cov_22");
  CHECK(header[6] == "det_cov");
  CHECK(header[7] == "purity");
  CHECK(header[8] == "energy");
  REQUIRE(rows.size() == 1001);

  SUBCASE("columns track the closed forms") {
    Matrix cov0(2, 2);
    cov0 << 1.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 1.0;
    Vector mean0(2);
    mean0 << 0.0, 1.0;
    for (std::size_t k = 0; k < rows.size(); k += 97) {
      const double t = rows[k][0];
      const Matrix cov = oracles::oscillator_cov_closed_form(t, cov0, 2.0, 1.0);
      const Vector mean =
          oracles::oscillator_mean_closed_form(t, mean0, 2.0, 1.0);
      CHECK(std::abs(rows[k][1] - mean(0)) < 1e-8);
      CHECK(std::abs(rows[k][2] - mean(1)) < 1e-8);
      CHECK(std::abs(rows[k][3] - cov(0, 0)) < 1e-8);
      CHECK(std::abs(rows[k][4] - cov(0, 1)) < 1e-8);
      CHECK(std::abs(rows[k][5] - cov(1, 1)) < 1e-8);
      CHECK(std::abs(rows[k][6] - 0.5) < 1e-9);
    }
  }
  SUBCASE("repeat runs are byte-identical") {
    const std::string first = slurp(dir / "fig1_trajectory.csv");
    const fs::path dir2 = temp_dir("evolve2");
    REQUIRE(run_evolve(sc, dir2) == 0);
    CHECK(first == slurp(dir2 / "fig1_trajectory.csv"));
  }
}

TEST_CASE("subsystem artifacts for the converter invariant run") {
  const fs::path dir = temp_dir("subsys");
  const Scenario sc = load_scenario(kScenarios / "converter_invariant.json");
  REQUIRE(run_evolve(sc, dir) == 0);
  std::vector<std::string> header;
  const auto rows =
      parse_csv(slurp(dir / "converter_invariant_subsystems.csv"), &header);
  REQUIRE(header == std::vector<std::string>{"t", "det_s1", "det_s2",
                                             "purity1", "purity2", "logneg"});
  for (const auto& row : rows) {
    CHECK(std::abs(row[1] - rows[0][1]) < 1e-9);
    CHECK(std::abs(row[2] - rows[0][2]) < 1e-9);
    CHECK(std::abs(row[5] - rows[0][5]) < 1e-8);
  }
}

TEST_CASE("invariants reports") {
  const fs::path dir = temp_dir("invariants");
  SUBCASE("oscillator") {
    const Scenario sc = load_scenario(kScenarios / "oscillator_invariants.json");
    REQUIRE(run_invariants(sc, dir) == 0);
    const json rep = json::parse(slurp(dir / "oscillator_invariants.json"));
    CHECK(rep.at("rank").get<int>() == 2);
    REQUIRE(rep.at("null_basis").size() == 1);
    const auto dir0 = rep["null_basis"][0];
    // direction proportional to (4, -1, 1)
    const double scale = dir0[0].get<double>() / 4.0;
    CHECK(dir0[1].get<double>() == doctest::Approx(-scale).epsilon(1e-10));
    CHECK(dir0[2].get<double>() == doctest::Approx(scale).epsilon(1e-10));
    CHECK(rep.at("physical")[0].get<bool>());
    CHECK(rep.at("constructed_states").size() == 1);
  }
  SUBCASE("converter and amplifier") {
    const Scenario conv = load_scenario(kScenarios / "converter_invariants.json");
    REQUIRE(run_invariants(conv, dir) == 0);
    const json crep = json::parse(slurp(dir / "converter_invariants.json"));
    CHECK(crep.at("rank").get<int>() == 8);
    CHECK(crep.at("physical")[0].get<bool>());
    CHECK_FALSE(crep.at("physical")[1].get<bool>());
    CHECK(crep.at("constructed_states").size() == 1);

    const Scenario amp = load_scenario(kScenarios / "amplifier_invariants.json");
    REQUIRE(run_invariants(amp, dir) == 0);
    const json arep = json::parse(slurp(dir / "amplifier_invariants.json"));
    CHECK(arep.at("rank").get<int>() == 8);
    CHECK_FALSE(arep.at("physical")[0].get<bool>());
    CHECK_FALSE(arep.at("physical")[1].get<bool>());
    CHECK(arep.at("constructed_states").empty());
  }
}

TEST_CASE("tomogram artifacts") {
  const fs::path dir = temp_dir("tomo");
  SUBCASE("vacuum grid matches the analytic normal") {
    const Scenario sc = load_scenario(kScenarios / "vacuum_tomogram.json");
    REQUIRE(run_tomogram(sc, dir) == 0);
    const auto rows = parse_csv(slurp(dir / "vacuum_tomogram.csv"), nullptr);
    for (const auto& row : rows) {
      const double x = row[0];
      CHECK(std::abs(row[3] - std::exp(-x * x) / std::sqrt(M_PI)) < 1e-14);
      CHECK(std::abs(row[4]) < 1e-8);  // normalization residual
    }
  }
  SUBCASE("thermal optical grid is theta independent") {
    const Scenario sc = load_scenario(kScenarios / "thermal_beta1.json");
    REQUIRE(run_tomogram(sc, dir) == 0);
    std::vector<std::string> header;
    const auto rows =
        parse_csv(slurp(dir / "thermal_beta1_optical.csv"), &header);
    // collect pdf by X value across frames
    std::map<double, std::vector<double>> by_x;
    for (const auto& row : rows) by_x[row[0]].push_back(row[3]);
    for (const auto& [x, vals] : by_x)
      for (double v : vals) CHECK(std::abs(v - vals.front()) < 1e-12);
  }
  SUBCASE("invariant-state grids at t = 0 and t = 5 are byte-identical") {
    const Scenario sc = load_scenario(kScenarios / "invariant_tomogram.json");
    REQUIRE(run_tomogram(sc, dir) == 0);
    CHECK(slurp(dir / "invariant_tomogram_t0.csv") ==
          slurp(dir / "invariant_tomogram_t5.csv"));
  }
}

TEST_CASE("thermal decomposition artifact") {
  const fs::path dir = temp_dir("thermal");
  const Scenario sc = load_scenario(kScenarios / "thermal_beta1.json");
  REQUIRE(run_thermal(sc, dir) == 0);
  std::vector<std::string> header;
  const auto rows =
      parse_csv(slurp(dir / "thermal_beta1_decomposition.csv"), &header);
  REQUIRE(header ==
          std::vector<std::string>{"n", "P_n", "partial_sum_residual"});
  REQUIRE(rows.size() == 61);
  // weights are the normalized geometric sequence
  CHECK(rows[0][1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(rows[1][1] ==
        doctest::Approx((1.0 - std::exp(-1.0)) * std::exp(-1.0))
            .epsilon(1e-14));
  // the residual column converges to zero
  CHECK(std::abs(rows.back()[2]) < 1e-10);
  CHECK(std::abs(rows[5][2]) > std::abs(rows[20][2]));
}
