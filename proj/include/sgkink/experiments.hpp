/// @file experiments.hpp
/// @brief Experiment configuration, the six experiment drivers, and report
/// output (report.json plus one CSV per table).
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sgkink/integrator.hpp"
#include "sgkink/tracker.hpp"

namespace sgk {

enum class Perturbation { Gaussian, OddSech, Custom };

/// One experiment. JSON layout (all keys optional except "name"):
///   name, grid {x_min, x_max, n}, scheme {kind, dt}, epsilon, beta0, x0, s, m,
///   perturbation ("gaussian" | "odd-sech" | {"custom": "<csv path>"}),
///   t_end, snapshot_every, seed, write_snapshots, options {...}, tolerances {...}.
/// A scheme dt of 0 means dx/2. Custom perturbation files hold rows
/// "x,dphi,dphi_t", interpolated linearly and scaled by epsilon.
struct ExperimentConfig {
  std::string name;
  double x_min = -256.0;
  double x_max = 256.0;
  std::size_t n = 8192;
  Scheme::Kind scheme = Scheme::Kind::Composition4;
  double dt = 0.0;
  double epsilon = 0.01;
  double beta0 = 0.0;
  double x0 = 0.0;
  double s = 1.0;
  double m = 2.0;
  Perturbation perturbation = Perturbation::Gaussian;
  std::string custom_file;
  double t_end = 100.0;
  double snapshot_every = 1.0;
  std::uint64_t seed = 0;
  bool write_snapshots = false;

  /// Experiment-specific options (see experiment_catalog for the keys).
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
  /// Overrides of the default check thresholds, keyed by check name.
  std::map<std::string, double> tolerances;

  double effective_dt() const;
};

/// Names and one-line descriptions of the experiments.
std::vector<std::pair<std::string, std::string>> experiment_catalog();

/// Parses and validates a config. Relative custom files are resolved against
/// base_dir. Throws std::invalid_argument with the offending key.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

/// A tolerance check: passes when lo <= value <= hi.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool pass = false;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  ExperimentConfig config;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<Table> tables;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, State>> snapshots;

  bool passed() const;
  const Check* find_check(const std::string& name) const;
  const Table* find_table(const std::string& name) const;
};

/// Runs the configured experiment. Module errors propagate with the
/// experiment name prefixed.
Report run_experiment(const ExperimentConfig& cfg);

/// Writes report.json, <table>.csv per table and <name>.sgf per snapshot.
/// Output is byte-identical for identical configs.
void write_report(const Report& r, const std::string& dir);

/// Perturbation profiles (dphi, dphi_t) before scaling by epsilon.
std::pair<Field, Field> perturbation_profile(const ExperimentConfig& cfg, const Grid& g);

}  // namespace sgk
