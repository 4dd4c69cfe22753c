#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "densgeo/space.hpp"

namespace densgeo {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentKind { Verify, TorsionScan, Convergence, GeodesicCompare };

struct SpaceConfig {
  std::string kind;  // "cycle" | "graph"
  int n = 0;
  double circumference = 2.0 * std::numbers::pi;
  LaplacianStyle style = LaplacianStyle::Variational;
  std::vector<double> volumes;
  std::vector<Edge> edges;
};

struct GeodesicConfig {
  double t_final = 0.5;
  int steps = 200;
  std::vector<double> rho0;  // empty: draw from the seed
  std::vector<double> v0;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Verify;
  std::string experiment_name;
  SpaceConfig space;
  std::string metric = "fisher_rao";
  std::vector<double> alphas = {-1.0, 0.0, 1.0};
  int trials = 10;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double fd_step = 1e-5;
  std::string out;
  std::string csv;
  GeodesicConfig geodesic;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& field, const std::string& message) {
  throw ConfigError("config error at field '" + field + "': " + message);
}

inline void require_keys(const nlohmann::json& j, const std::string& scope,
                         const std::set<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      config_fail(scope.empty() ? item.key() : scope + "." + item.key(),
                  "unknown field");
    }
  }
}

inline std::string enum_message(const std::string& got,
                                const std::vector<std::string>& allowed) {
  std::string msg = "unknown value '" + got + "', expected one of";
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    msg += (i == 0 ? " '" : ", '") + allowed[i] + "'";
  }
  return msg;
}

inline std::string scoped(const std::string& scope, const std::string& field) {
  return scope.empty() ? field : scope + "." + field;
}

inline std::string get_enum(const nlohmann::json& j, const std::string& field,
                            const std::vector<std::string>& allowed,
                            const std::string& fallback, const std::string& scope = "") {
  if (!j.contains(field)) {
    if (!fallback.empty()) return fallback;
    config_fail(scoped(scope, field), "required field is missing");
  }
  if (!j.at(field).is_string()) config_fail(scoped(scope, field), "expected a string");
  const std::string value = j.at(field).get<std::string>();
  for (const auto& a : allowed) {
    if (value == a) return value;
  }
  config_fail(scoped(scope, field), enum_message(value, allowed));
}

inline double get_number(const nlohmann::json& j, const std::string& field, double fallback,
                         bool required = false, const std::string& scope = "") {
  if (!j.contains(field)) {
    if (required) config_fail(scoped(scope, field), "required field is missing");
    return fallback;
  }
  if (!j.at(field).is_number()) config_fail(scoped(scope, field), "expected a number");
  return j.at(field).get<double>();
}

inline int get_positive_int(const nlohmann::json& j, const std::string& field, int fallback,
                            bool required = false, const std::string& scope = "") {
  if (!j.contains(field)) {
    if (required) config_fail(scoped(scope, field), "required field is missing");
    return fallback;
  }
  if (!j.at(field).is_number_integer()) config_fail(scoped(scope, field), "expected an integer");
  const auto v = j.at(field).get<std::int64_t>();
  if (v <= 0) config_fail(scoped(scope, field), "expected a positive integer");
  return static_cast<int>(v);
}

inline std::vector<double> get_number_array(const nlohmann::json& j, const std::string& field,
                                            const std::string& scope = "") {
  if (!j.at(field).is_array()) {
    config_fail(scoped(scope, field), "expected an array of numbers");
  }
  std::vector<double> out;
  for (const auto& e : j.at(field)) {
    if (!e.is_number()) config_fail(scoped(scope, field), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline SpaceConfig parse_space(const nlohmann::json& j) {
  if (!j.is_object()) config_fail("space", "expected an object");
  SpaceConfig sc;
  sc.kind = get_enum(j, "kind", {"cycle", "graph"}, "", "space");
  if (sc.kind == "cycle") {
    require_keys(j, "space", {"kind", "n", "circumference", "laplacian_style"});
    sc.n = get_positive_int(j, "n", 0, true, "space");
    if (sc.n < 3) config_fail("space.n", "a cycle needs at least 3 points");
    sc.circumference = get_number(j, "circumference", 2.0 * std::numbers::pi, false, "space");
    if (!(sc.circumference > 0)) config_fail("space.circumference", "expected a positive number");
    const std::string style = get_enum(j, "laplacian_style",
                                       {"variational", "compositional"}, "variational", "space");
    sc.style = style == "variational" ? LaplacianStyle::Variational
                                      : LaplacianStyle::Compositional;
  } else {
    require_keys(j, "space", {"kind", "volumes", "edges"});
    if (!j.contains("volumes")) config_fail("space.volumes", "required field is missing");
    sc.volumes = get_number_array(j, "volumes", "space");
    if (!j.contains("edges")) config_fail("space.edges", "required field is missing");
    if (!j.at("edges").is_array()) {
      config_fail("space.edges", "expected an array of [i, j, weight] triples");
    }
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || !e[2].is_number()) {
        config_fail("space.edges", "expected an array of [i, j, weight] triples");
      }
      sc.edges.push_back(Edge{e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    sc.n = static_cast<int>(sc.volumes.size());
  }
  return sc;
}

}  // namespace detail

inline std::shared_ptr<const Space> build_space(const SpaceConfig& sc) {
  try {
    if (sc.kind == "cycle") {
      return Space::make_cycle(sc.n, sc.circumference, sc.style);
    }
    Eigen::Map<const Eigen::VectorXd> vols(sc.volumes.data(),
                                           static_cast<Eigen::Index>(sc.volumes.size()));
    return Space::make_graph(vols, sc.edges);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error at field 'space': ") + e.what());
  }
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                                     std::optional<std::uint64_t> seed_override = std::nullopt) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config error in " + origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config error in " + origin + ": expected a JSON object");

  detail::require_keys(j, "", {"experiment", "space", "metric", "alphas", "trials", "seed",
                               "fd_step", "out", "csv", "geodesic"});

  ExperimentConfig cfg;
  cfg.experiment_name = detail::get_enum(
      j, "experiment", {"verify", "torsion_scan", "convergence", "geodesic_compare"}, "");
  if (cfg.experiment_name == "verify") cfg.experiment = ExperimentKind::Verify;
  if (cfg.experiment_name == "torsion_scan") cfg.experiment = ExperimentKind::TorsionScan;
  if (cfg.experiment_name == "convergence") cfg.experiment = ExperimentKind::Convergence;
  if (cfg.experiment_name == "geodesic_compare") cfg.experiment = ExperimentKind::GeodesicCompare;

  if (!j.contains("space")) detail::config_fail("space", "required field is missing");
  cfg.space = detail::parse_space(j.at("space"));

  cfg.metric = detail::get_enum(j, "metric", {"fisher_rao", "otto"}, "fisher_rao");

  if (j.contains("alphas")) {
    cfg.alphas = detail::get_number_array(j, "alphas");
    if (cfg.alphas.empty()) detail::config_fail("alphas", "expected a nonempty array");
  }
  cfg.trials = detail::get_positive_int(j, "trials", 10);
  cfg.fd_step = detail::get_number(j, "fd_step", 1e-5);
  if (!(cfg.fd_step > 0)) detail::config_fail("fd_step", "expected a positive number");

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer() || j.at("seed").get<std::int64_t>() < 0) {
      detail::config_fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
  }
  if (j.contains("out")) {
    if (!j.at("out").is_string()) detail::config_fail("out", "expected a string");
    cfg.out = j.at("out").get<std::string>();
  }
  if (j.contains("csv")) {
    if (!j.at("csv").is_string()) detail::config_fail("csv", "expected a string");
    cfg.csv = j.at("csv").get<std::string>();
  }

  if (j.contains("geodesic")) {
    const auto& g = j.at("geodesic");
    if (!g.is_object()) detail::config_fail("geodesic", "expected an object");
    detail::require_keys(g, "geodesic", {"t_final", "steps", "rho0", "v0"});
    cfg.geodesic.t_final = detail::get_number(g, "t_final", 0.5, false, "geodesic");
    if (!(cfg.geodesic.t_final > 0)) {
      detail::config_fail("geodesic.t_final", "expected a positive number");
    }
    cfg.geodesic.steps = detail::get_positive_int(g, "steps", 200, false, "geodesic");
    if (g.contains("rho0")) cfg.geodesic.rho0 = detail::get_number_array(g, "rho0", "geodesic");
    if (g.contains("v0")) cfg.geodesic.v0 = detail::get_number_array(g, "v0", "geodesic");
    if (cfg.geodesic.rho0.empty() != cfg.geodesic.v0.empty()) {
      detail::config_fail("geodesic", "rho0 and v0 must be given together or both omitted");
    }
    if (!cfg.geodesic.rho0.empty() &&
        (static_cast<int>(cfg.geodesic.rho0.size()) != cfg.space.n ||
         static_cast<int>(cfg.geodesic.v0.size()) != cfg.space.n)) {
      detail::config_fail("geodesic.rho0", "length must match the space size");
    }
  }

  if (seed_override) {
    cfg.seed = *seed_override;
    cfg.seed_set = true;
  }

  const bool needs_seed =
      cfg.experiment == ExperimentKind::Verify ||
      cfg.experiment == ExperimentKind::TorsionScan ||
      (cfg.experiment == ExperimentKind::GeodesicCompare && cfg.geodesic.rho0.empty());
  if (needs_seed && !cfg.seed_set) {
    detail::config_fail("seed", "required for randomized experiments (or pass --seed)");
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path,
                                         std::optional<std::uint64_t> seed_override =
                                             std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), "'" + path + "'", seed_override);
}

}  // namespace densgeo
