#pragma once

#include "qbeckner/semigroup.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qb::app {

using json = nlohmann::json;

// Matrices travel as nested arrays of [re, im] pairs, row-major.
json matrix_to_json(const Mat& M);
Mat matrix_from_json(const json& j, const std::string& field);

struct SigmaSpec {
  std::vector<double> eigenvalues;  // empty: maximally mixed (filled in by the parser)
  std::optional<Mat> basis;         // columns are eigenvectors
  bool operator==(const SigmaSpec&) const;
};

struct GeneratorSpec {
  std::string kind = "depolarizing";  // depolarizing | jumps | random_dbc | superoperator
  double gamma = 1.0;
  std::vector<JumpTerm> jumps;
  int pairs = -1;  // random_dbc; negative means dimension
  int diag = 1;
  std::uint64_t seed = 0;
  Mat matrix;  // superoperator, column stacking
  bool operator==(const GeneratorSpec&) const;
};

struct Tolerances {
  double decay = 1e-8;       // relative to 1 + F_0
  double properties = 1e-9;  // verify-suite slack
  bool operator==(const Tolerances&) const = default;
};

struct Seeds {
  std::uint64_t states = 7;
  std::uint64_t estimate = 7;
  std::uint64_t ricci = 7;
  bool operator==(const Seeds&) const = default;
};

struct EstimateConfig {
  int num_starts = 16;
  int max_iters = 2000;
  double tol = 1e-8;
  bool operator==(const EstimateConfig&) const = default;
};

struct DecayConfig {
  int states = 3;
  std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  bool operator==(const DecayConfig&) const = default;
};

struct MixingConfig {
  std::vector<double> eps{0.1, 0.01};
  bool operator==(const MixingConfig&) const = default;
};

struct TransportConfig {
  std::vector<double> p{1.5, 2.0};
  int pairs = 2;
  int steps = 20;
  double tol = 1e-7;
  int max_iters = 5000;
  bool operator==(const TransportConfig&) const = default;
};

struct RicciConfig {
  std::vector<double> p{1.5, 2.0};
  int samples = 64;
  int check_states = 3;
  bool operator==(const RicciConfig&) const = default;
};

inline const std::vector<std::string> kTaskOrder{"constants", "decay", "mixing", "transport", "ricci", "verify"};

struct ExperimentConfig {
  int dimension = 2;
  SigmaSpec sigma;
  GeneratorSpec generator;
  std::vector<double> p_grid{1.05, 1.1, 1.25, 1.5, 1.75, 2.0};
  std::vector<double> q_grid{1.25, 1.5, 1.75};
  Tolerances tolerances;
  Seeds seeds;
  EstimateConfig estimate;
  DecayConfig decay;
  MixingConfig mixing;
  TransportConfig transport;
  RicciConfig ricci;
  std::vector<std::string> tasks;
  bool operator==(const ExperimentConfig&) const = default;

  void set_seed(std::uint64_t s) { seeds = {s, s, s}; }
};

// ConfigError names the offending field (and line, for syntax errors).
ExperimentConfig parse_config(const json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
json config_to_json(const ExperimentConfig& c);

inline const std::vector<std::string> kFixtureNames{"depol2", "depol3", "random_dbc_seeded", "classical_embed"};
ExperimentConfig fixture(const std::string& name, double theta = 0.5);

Mat build_sigma(const ExperimentConfig& c);
DbcLindbladian build_model(const ExperimentConfig& c);

struct Check {
  std::string task;
  std::string name;
  std::string detail;  // parameters such as p, pair index, time
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool hard = true;
};
json check_to_json(const Check& c);

struct TaskError {
  std::string task;
  std::string code;
  std::string message;
};

// Tables for CSV output and (x, y) series for plot data.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
struct Series {
  std::string name;
  std::string x_label, y_label;
  std::vector<double> x, y;
};

struct RunReport {
  json config;
  std::vector<std::string> tasks_run;
  json results = json::object();
  std::vector<Check> checks;
  std::vector<TaskError> errors;
  json timings = json::object();
  std::vector<Table> tables;
  std::vector<Series> series;

  bool hard_pass() const;
  json to_json(bool with_timings = true) const;
};

// Requested tasks plus their prerequisites, in dependency order.
std::vector<std::string> resolve_tasks(const std::vector<std::string>& requested);

RunReport run(const ExperimentConfig& c);

enum class Format { Json, Csv, Plotdata };
Format parse_format(const std::string& s);
// Writes into dir (created if needed); every file goes through temp + rename.
std::vector<std::string> emit(const RunReport& r, Format f, const std::string& dir);
void write_atomic(const std::string& path, const std::string& content);
std::string format_double(double x);

// Plain-text table of failed checks and task errors.
std::string failure_table(const RunReport& r);

}  // namespace qb::app
