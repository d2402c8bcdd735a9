#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gaussdyn/hamiltonians.hpp"
#include "gaussdyn/types.hpp"

// JSON bindings for the value types and deterministic CSV output.
// Numbers are formatted with 17 significant digits, "." decimal separator,
// LF line endings; artifact writes go through a temp file plus rename.

namespace gaussdyn {

using nlohmann::json;

/// %.17g rendering used for every CSV number.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json complex_to_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ScenarioParseError("complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json state_to_json(const GaussianState& s) {
  json cov = json::array();
  for (Eigen::Index i = 0; i < s.cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < s.cov.cols(); ++k) row.push_back(s.cov(i, k));
    cov.push_back(row);
  }
  json mean = json::array();
  for (Eigen::Index i = 0; i < s.mean.size(); ++i) mean.push_back(s.mean(i));
  return {{"n_modes", s.n_modes}, {"mean", mean}, {"cov", cov}};
}

inline GaussianState state_from_json(const json& j) {
  GaussianState s;
  try {
    s.n_modes = j.at("n_modes").get<int>();
    const auto& mean = j.at("mean");
    const auto& cov = j.at("cov");
    const int n = 2 * s.n_modes;
    if (static_cast<int>(mean.size()) != n ||
        static_cast<int>(cov.size()) != n)
      throw ScenarioParseError("state dimensions do not match n_modes");
    s.mean = Vector(n);
    for (int i = 0; i < n; ++i) s.mean(i) = mean[i].get<double>();
    s.cov = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(cov[i].size()) != n)
        throw ScenarioParseError("covariance rows must have length 2N");
      for (int k = 0; k < n; ++k) s.cov(i, k) = cov[i][k].get<double>();
    }
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("bad state record: ") + e.what());
  }
  return s;
}

inline json params_1d_to_json(const DensityParams1D& p) {
  return {{"a1", complex_to_json(p.a1)},
          {"a12", p.a12},
          {"b", complex_to_json(p.b)}};
}

inline DensityParams1D params_1d_from_json(const json& j) {
  try {
    DensityParams1D p;
    p.a1 = complex_from_json(j.at("a1"));
    p.a12 = j.at("a12").get<double>();
    p.b = j.contains("b") ? complex_from_json(j.at("b")) : Complex(0.0, 0.0);
    return p;
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("bad params_1d record: ") + e.what());
  }
}

inline json params_bipartite_to_json(const DensityParamsBipartite& p) {
  return {{"a11", complex_to_json(p.a11)}, {"a22", complex_to_json(p.a22)},
          {"a12", complex_to_json(p.a12)}, {"a14", complex_to_json(p.a14)},
          {"a13", p.a13},                  {"a24", p.a24}};
}

inline DensityParamsBipartite params_bipartite_from_json(const json& j) {
  try {
    DensityParamsBipartite p;
    p.a11 = complex_from_json(j.at("a11"));
    p.a22 = complex_from_json(j.at("a22"));
    p.a12 = complex_from_json(j.at("a12"));
    p.a14 = complex_from_json(j.at("a14"));
    p.a13 = j.at("a13").get<double>();
    p.a24 = j.at("a24").get<double>();
    return p;
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("bad bipartite params record: ") +
                             e.what());
  }
}

/// Hamiltonian from {"model": ..., "params": {...}}. The file format accepts
/// constant generic1d coefficients; arbitrary time dependence is API-only.
inline QuadraticHamiltonian hamiltonian_from_json(const json& j) {
  try {
    const std::string model = j.at("model").get<std::string>();
    const json& p = j.value("params", json::object());
    auto c = [&](const char* key, double fallback = 0.0) {
      return p.contains(key) ? p.at(key).get<double>() : fallback;
    };
    if (model == "generic1d") {
      auto constant = [](double v) {
        return [v](double) { return v; };
      };
      return build_generic_1d(constant(c("omega1")), constant(c("omega2")),
                              constant(c("omega3")), constant(c("delta1")),
                              constant(c("delta2")));
    }
    if (model == "oscillator")
      return build_coupled_oscillator(c("omega", 1.0), c("nu"));
    if (model == "frequency_converter")
      return build_frequency_converter(c("omega1", 1.0), c("omega2", 1.0),
                                       c("omega"), c("kappa"));
    if (model == "parametric_amplifier")
      return build_parametric_amplifier(c("omega1", 1.0), c("omega2", 1.0),
                                        c("omega"), c("kappa"));
    throw ScenarioParseError("unknown model \"" + model + "\"");
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("bad hamiltonian record: ") +
                             e.what());
  }
}

inline IntegratorConfig integrator_from_json(const json& j) {
  try {
    IntegratorConfig cfg;
    const std::string method = j.value("method", "rk4_fixed");
    if (method == "rk4_fixed")
      cfg.method = IntegratorConfig::Method::rk4_fixed;
    else if (method == "rk45_adaptive")
      cfg.method = IntegratorConfig::Method::rk45_adaptive;
    else
      throw ScenarioParseError("unknown integrator method \"" + method + "\"");
    cfg.dt = j.value("dt", 1e-3);
    cfg.t_max = j.at("t_max").get<double>();
    cfg.sample_stride = j.value("sample_stride", 1);
    cfg.rel_tol = j.value("rel_tol", 1e-9);
    cfg.abs_tol = j.value("abs_tol", 1e-12);
    if (cfg.dt <= 0.0 || cfg.t_max <= 0.0 || cfg.sample_stride < 1)
      throw ScenarioParseError("integrator needs dt > 0, t_max > 0, stride >= 1");
    return cfg;
  } catch (const json::exception& e) {
    throw ScenarioParseError(std::string("bad integrator record: ") + e.what());
  }
}

/// Write `text` to `path` atomically (temp file in the same directory, then
/// rename over the target).
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& text) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot open " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

/// CSV assembly with a fixed header; every cell already formatted.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) text_ += ',';
      text_ += header[i];
    }
    text_ += '\n';
    columns_ = header.size();
  }

  void add_row(const std::vector<double>& row) {
    if (row.size() != columns_)
      throw Error("IoError", "CSV row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text_ += ',';
      text_ += format_g17(row[i]);
    }
    text_ += '\n';
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::size_t columns_ = 0;
};

}  // namespace gaussdyn
