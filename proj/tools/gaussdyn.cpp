// Batch front-end over scenario JSON files.
//
//   gaussdyn evolve     <scenario.json> [--out DIR]
//   gaussdyn invariants <scenario.json> [--out DIR]
//   gaussdyn tomogram   <scenario.json> [--out DIR]
//   gaussdyn thermal    <scenario.json> [--out DIR]
//   gaussdyn validate   <scenario.json>
//
// Module errors are reported as one-line JSON on stderr with a stable
// "error" name; the process exits nonzero.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "gaussdyn/scenario.hpp"

namespace {

void apply_thread_cap() {
  if (const char* cap = std::getenv("GAUSSDYN_THREADS")) {
    const int n = std::atoi(cap);
    if (n > 0) Eigen::setNbThreads(n);
  }
}

int guarded(int (*runner)(const gaussdyn::Scenario&,
                          const std::filesystem::path&),
            const std::string& scenario_path, const std::string& out_dir) {
  try {
    const gaussdyn::Scenario sc = gaussdyn::load_scenario(scenario_path);
    return runner(sc, out_dir);
  } catch (const gaussdyn::Error& e) {
    std::cerr << gaussdyn::json{{"error", e.name()}, {"message", e.what()}}
                     .dump()
              << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << gaussdyn::json{{"error", "InternalError"},
                                {"message", e.what()}}
                     .dump()
              << std::endl;
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"Gaussian-state dynamics toolkit"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("scenario", scenario_path, "scenario JSON file")
        ->required();
    if (with_out)
      cmd->add_option("--out", out_dir, "directory for output artifacts");
  };

  CLI::App* evolve = app.add_subcommand("evolve", "integrate and export");
  add_common(evolve, true);
  CLI::App* invariants =
      app.add_subcommand("invariants", "null-space report of the flow matrix");
  add_common(invariants, true);
  CLI::App* tomogram =
      app.add_subcommand("tomogram", "tomographic pdf grids");
  add_common(tomogram, true);
  CLI::App* thermal =
      app.add_subcommand("thermal", "thermal Fock-decomposition tables");
  add_common(thermal, true);
  CLI::App* validate =
      app.add_subcommand("validate", "schema-check a scenario file");
  add_common(validate, false);

  CLI11_PARSE(app, argc, argv);

  if (evolve->parsed())
    return guarded(gaussdyn::run_evolve, scenario_path, out_dir);
  if (invariants->parsed())
    return guarded(gaussdyn::run_invariants, scenario_path, out_dir);
  if (tomogram->parsed())
    return guarded(gaussdyn::run_tomogram, scenario_path, out_dir);
  if (thermal->parsed())
    return guarded(gaussdyn::run_thermal, scenario_path, out_dir);
  // validate
  try {
    (void)gaussdyn::load_scenario(scenario_path);
    std::cout << "{\"valid\": true}" << std::endl;
    return 0;
  } catch (const gaussdyn::Error& e) {
    std::cerr << gaussdyn::json{{"error", e.name()}, {"message", e.what()}}
                     .dump()
              << std::endl;
    return 1;
  }
}
