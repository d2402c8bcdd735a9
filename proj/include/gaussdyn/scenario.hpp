#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "gaussdyn/invariant_states.hpp"
#include "gaussdyn/serialization.hpp"
#include "gaussdyn/subsystem.hpp"
#include "gaussdyn/tomography.hpp"

// Scenario files drive the batch front-end: one JSON document selects a
// Hamiltonian model, an initial state (covariance or parameter record), an
// integrator, and a list of output products. Runs are deterministic;
// identical scenario + identical build produce byte-identical artifacts.

namespace gaussdyn {

struct OutputSpec {
  std::string kind;  // trajectory | subsystems | energy | invariants |
                     // tomogram_grid | thermal
  std::string path;
  json options;
};

struct Scenario {
  json hamiltonian_json;
  QuadraticHamiltonian hamiltonian;
  GaussianState initial_state;
  IntegratorConfig integrator;
  std::vector<OutputSpec> outputs;
  std::uint64_t seed = 0;
};

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  try {
    sc.hamiltonian_json = j.at("hamiltonian");
    sc.hamiltonian = hamiltonian_from_json(sc.hamiltonian_json);
    const json& init = j.at("initial_state");
    if (init.contains("params_1d"))
      sc.initial_state = state_from_params_1d(
          params_1d_from_json(init.at("params_1d")));
    else if (init.contains("params_bipartite"))
      sc.initial_state = covariances_from_bipartite_params(
          params_bipartite_from_json(init.at("params_bipartite")));
    else
      sc.initial_state = state_from_json(init);
    sc.integrator = integrator_from_json(j.at("integrator"));
    sc.seed = j.value("seed", 0);
    std::set<std::string> paths;
    for (const auto& out : j.value("outputs", json::array())) {
      OutputSpec spec;
      spec.kind = out.at("kind").get<std::string>();
      spec.path = out.at("path").get<std::string>();
      spec.options = out.value("options", json::object());
      if (!paths.insert(spec.path).second)
        throw ScenarioParseError("duplicate output path " + spec.path);
      sc.outputs.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("bad scenario: ") + e.what());
  }
  if (sc.initial_state.n_modes != sc.hamiltonian.n_modes)
    throw ScenarioParseError("initial state and model mode counts differ");
  if (!is_physical(sc.initial_state))
    throw ScenarioParseError("initial state violates the Robertson bound");
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& out_dir,
                                     const std::string& rel) {
  return out_dir.empty() ? std::filesystem::path(rel) : out_dir / rel;
}

inline std::string trajectory_csv(const Trajectory& traj, int n_modes) {
  const int n = 2 * n_modes;
  std::vector<std::string> header{"t"};
  for (int i = 1; i <= n; ++i) header.push_back("mean_" + std::to_string(i));
  for (int i = 1; i <= n; ++i)
    for (int k = i; k <= n; ++k)
      header.push_back("cov_" + std::to_string(i) + std::to_string(k));
  header.insert(header.end(), {"det_cov", "purity", "energy"});
  CsvBuilder csv(header);
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    std::vector<double> row{traj.times[s]};
    const auto& st = traj.states[s];
    for (int i = 0; i < n; ++i) row.push_back(st.mean(i));
    const Vector v = vectorize_cov(st.cov);
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
    row.push_back(traj.det_cov[s]);
    row.push_back(1.0 / (std::pow(2.0, n_modes) *
                         std::sqrt(std::max(traj.det_cov[s], 0.0))));
    row.push_back(traj.energies[s]);
    csv.add_row(row);
  }
  return csv.text();
}

inline std::string subsystems_csv(const Trajectory& traj) {
  const auto series = subsystem_purities(traj);
  CsvBuilder csv({"t", "det_s1", "det_s2", "purity1", "purity2", "logneg"});
  for (std::size_t s = 0; s < traj.times.size(); ++s)
    csv.add_row({traj.times[s], series.det_s1[s], series.det_s2[s],
                 series.purity1[s], series.purity2[s],
                 log_negativity(traj.states[s].cov)});
  return csv.text();
}

inline std::string energy_csv(const Trajectory& traj) {
  CsvBuilder csv({"t", "energy"});
  for (std::size_t s = 0; s < traj.times.size(); ++s)
    csv.add_row({traj.times[s], traj.energies[s]});
  return csv.text();
}

// State at options["time"], integrating forward when nonzero.
inline GaussianState state_at_time(const Scenario& sc, double t) {
  if (t == 0.0) return sc.initial_state;
  IntegratorConfig cfg = sc.integrator;
  cfg.t_max = t;
  cfg.sample_stride =
      static_cast<int>(std::max<long long>(1, std::llround(t / cfg.dt)));
  const Trajectory traj = evolve(sc.hamiltonian, sc.initial_state, cfg);
  return traj.states.back();
}

inline std::string tomogram_grid_csv(const Scenario& sc, const json& opt) {
  const double t = opt.value("time", 0.0);
  const GaussianState state = state_at_time(sc, t);
  GaussianTomogram tg;
  if (state.n_modes == 1)
    tg = tomogram_of_state(state, 0);
  else
    tg = marginal_tomogram(two_mode_tomogram(state), opt.value("mode", 0));

  std::vector<std::pair<double, double>> frames;
  if (opt.contains("theta_count")) {
    const int m = opt.at("theta_count").get<int>();
    for (int i = 0; i < m; ++i) {
      const double th = M_PI * i / m;
      frames.emplace_back(std::cos(th), std::sin(th));
    }
  } else if (opt.contains("mu") && opt.contains("nu")) {
    const auto& mus = opt.at("mu");
    const auto& nus = opt.at("nu");
    if (mus.size() != nus.size())
      throw ScenarioParseError("mu and nu lists differ in length");
    for (std::size_t i = 0; i < mus.size(); ++i)
      frames.emplace_back(mus[i].get<double>(), nus[i].get<double>());
  } else {
    frames.emplace_back(1.0, 0.0);
  }

  const json& xg = opt.value("X", json{{"min", -5.0}, {"max", 5.0},
                                       {"count", 41}});
  const double x0 = xg.at("min").get<double>();
  const double x1 = xg.at("max").get<double>();
  const int count = xg.at("count").get<int>();

  // per-frame normalization residual by 200-point quadrature, with the rule
  // recentered and rescaled onto the pdf
  static const GaussHermiteRule rule = gauss_hermite(200);
  CsvBuilder csv({"X", "mu", "nu", "pdf", "norm_residual"});
  for (const auto& [mu, nu] : frames) {
    const double mean = tomogram_mean(tg, mu, nu);
    const double width = std::sqrt(2.0 * tomogram_dispersion(tg, mu, nu));
    const double norm = integrate_gh(rule, [&](double u) {
      return width * tomogram_pdf(tg, mean + width * u, mu, nu);
    });
    for (int i = 0; i < count; ++i) {
      const double x =
          count == 1 ? x0 : x0 + (x1 - x0) * i / static_cast<double>(count - 1);
      csv.add_row({x, mu, nu, tomogram_pdf(tg, x, mu, nu), norm - 1.0});
    }
  }
  return csv.text();
}

inline std::string thermal_csv(const json& opt) {
  ThermalSpec spec;
  spec.beta = opt.value("beta", 1.0);
  spec.n_max = opt.value("n_max", 60);
  const double x = opt.value("X", 0.0);
  const double mu = opt.value("mu", 1.0);
  const double nu = opt.value("nu", 0.0);
  const Thermal1D th = thermal_state_1d(spec);
  const GaussianTomogram tg = tomogram_of_state(th.state);
  const double closed = tomogram_pdf(tg, x, mu, nu);
  CsvBuilder csv({"n", "P_n", "partial_sum_residual"});
  double partial = 0.0;
  const double base = 1.0 - std::exp(-spec.beta);
  for (int n = 0; n <= spec.n_max; ++n) {
    const double pn = base * std::exp(-n * spec.beta);
    partial += pn * fock_tomogram(n, x, mu, nu);
    csv.add_row({static_cast<double>(n), pn, partial - closed});
  }
  return csv.text();
}

inline json invariants_report(const Scenario& sc, const json& opt) {
  const double t = opt.value("time", 0.0);
  const Matrix b = sc.hamiltonian.b(t);
  FlowMatrix fm = sc.hamiltonian.n_modes == 1
                      ? build_flow_matrix_1d(b(0, 0), b(0, 1), b(1, 1), t)
                      : build_flow_matrix_2mode(b, t);
  const NullSpaceResult ns = null_space(fm, opt.value("tol", 1e-10));
  const auto dirs = canonical_null_directions(ns, sc.hamiltonian.n_modes);

  json report;
  report["rank"] = ns.rank;
  json svs = json::array();
  for (Eigen::Index i = 0; i < ns.singular_values.size(); ++i)
    svs.push_back(ns.singular_values(i));
  report["singular_values"] = svs;
  json basis = json::array();
  json flags = json::array();
  json states = json::array();
  for (const auto& dir : dirs) {
    json bj = json::array();
    for (Eigen::Index i = 0; i < dir.size(); ++i) bj.push_back(dir(i));
    basis.push_back(bj);
    const bool ok = physical_after_scaling(dir, sc.hamiltonian.n_modes);
    flags.push_back(ok);
    if (ok) {
      const Matrix unit = unvectorize_cov(dir, sc.hamiltonian.n_modes);
      const Matrix oriented = unit.trace() >= 0.0 ? unit : Matrix(-unit);
      GaussianState st;
      st.n_modes = sc.hamiltonian.n_modes;
      st.mean = Vector::Zero(2 * sc.hamiltonian.n_modes);
      st.cov = physical_scale(oriented) * oriented;
      states.push_back(state_to_json(st));
    }
  }
  report["null_basis"] = basis;
  report["physical"] = flags;
  report["constructed_states"] = states;
  return report;
}

}  // namespace detail

/// `evolve` command: trajectory / subsystems / energy products.
inline int run_evolve(const Scenario& sc,
                      const std::filesystem::path& out_dir = {}) {
  const Trajectory traj = evolve(sc.hamiltonian, sc.initial_state,
                                 sc.integrator);
  for (const auto& out : sc.outputs) {
    if (out.kind == "trajectory")
      atomic_write(detail::resolve(out_dir, out.path),
                   detail::trajectory_csv(traj, sc.hamiltonian.n_modes));
    else if (out.kind == "subsystems")
      atomic_write(detail::resolve(out_dir, out.path),
                   detail::subsystems_csv(traj));
    else if (out.kind == "energy")
      atomic_write(detail::resolve(out_dir, out.path),
                   detail::energy_csv(traj));
  }
  return 0;
}

/// `invariants` command: null-space report JSON.
inline int run_invariants(const Scenario& sc,
                          const std::filesystem::path& out_dir = {}) {
  for (const auto& out : sc.outputs)
    if (out.kind == "invariants")
      atomic_write(detail::resolve(out_dir, out.path),
                   detail::invariants_report(sc, out.options).dump(2) + "\n");
  return 0;
}

/// `tomogram` command: pdf grids.
inline int run_tomogram(const Scenario& sc,
                        const std::filesystem::path& out_dir = {}) {
  for (const auto& out : sc.outputs)
    if (out.kind == "tomogram_grid")
      atomic_write(detail::resolve(out_dir, out.path),
                   detail::tomogram_grid_csv(sc, out.options));
  return 0;
}

/// `thermal` command: Fock decomposition tables.
inline int run_thermal(const Scenario& sc,
                       const std::filesystem::path& out_dir = {}) {
  for (const auto& out : sc.outputs)
    if (out.kind == "thermal")
      atomic_write(detail::resolve(out_dir, out.path),
                   detail::thermal_csv(out.options));
  return 0;
}

}  // namespace gaussdyn
