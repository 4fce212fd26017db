#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlsq/common.hpp"
#include "dlsq/graph.hpp"
#include "dlsq/problem.hpp"
#include "dlsq/solvers.hpp"

namespace dlsq {

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

/// Time-indexed recording of a run: t, per-node x and v, and (mode
/// dependent) frequency estimates, identifier errors and compensation
/// values. Rows are stored flat, one row per recorded sample, in the
/// column order of `columns` (column 0 is t).
struct Trace {
  int node_count = 0;
  int dimension = 0;
  std::vector<int> k_per_node;  // non-empty for adaptive runs
  bool has_identifier = false;
  bool has_compensation = false;

  std::vector<std::string> columns;
  std::vector<double> data;
  std::vector<SolverEvent> events;

  std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
  double value(std::size_t row, std::size_t col) const { return data[row * columns.size() + col]; }
  double time(std::size_t row) const { return value(row, 0); }

  int col_x(int node, int comp) const { return 1 + node * dimension + comp; }
  int col_v(int node, int comp) const { return 1 + (node_count + node) * dimension + comp; }
  int col_omega(int node, int j) const;
  int col_identifier_error(int node) const;
  int col_compensation(int node) const;

  /// max over nodes of |x_i(row) - ref|
  double node_error(std::size_t row, const Eigen::VectorXd& ref) const;
  /// sum over nodes of |x_i(row) - ref|^2
  double stacked_sq_error(std::size_t row, const Eigen::VectorXd& ref) const;
};

/// One row per recorded sample, "%.17g" formatting (bit-exact round trip).
/// An empty trace produces a header-only file.
void export_csv(const Trace& trace, const std::string& path);

/// Least-squares slope of log ||x(t) - 1 (x) y*|| over rows with
/// t0 <= t <= t1; errors are clipped at 1e-300 before the log. Throws
/// ValidationError when the window holds fewer than 10 samples.
double fit_decay_rate(const Trace& trace, double t0, double t1, const Eigen::VectorXd& ystar);

/// Trapezoid integral of sum_i |x_i(t) - y*|^2 over [t0, t1].
double error_energy(const Trace& trace, double t0, double t1, const Eigen::VectorXd& ystar);

// ---------------------------------------------------------------------------
// Scenario configuration
// ---------------------------------------------------------------------------

struct NoiseConfig {
  double sigma = 0.0;
  double hold_dt = 0.1;
};

struct SimConfig {
  double t_end = 100.0;
  double dt = 1e-3;
  int decimation = 1;
  std::uint64_t seed = 1;
  double init_range = 1.0;
  double energy_window_start = 0.0;  // start of the reported error-energy window
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  Eigen::MatrixXd H;
  Eigen::VectorXd z;
  int graph_nodes = 0;
  Eigen::MatrixXd adjacency;  // either this (non-empty) or edges
  std::vector<Digraph::Edge> edges;
  std::vector<std::vector<Sinusoid>> disturbance;  // empty = clean measurements
  SolverCore core = SolverCore::Exact;
  SolverGains gains;
  CompensatorConfig compensator;
  NoiseConfig noise;
  SimConfig sim;

  Digraph build_graph() const;
  LsqProblem build_problem() const;
  DisturbanceSpec build_disturbance() const;
};

/// Parses and validates a config; error messages carry the offending field
/// path (e.g. "compensator.observer_gains[2]").
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config_file(const std::string& path);

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string json;
};

const std::vector<BuiltinScenario>& builtin_scenarios();

/// Resolves a builtin name or a config file path.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct RunSummary {
  Eigen::VectorXd ystar;
  Eigen::VectorXd final_error_per_node;  // |x_i(T) - y*|
  double final_error_max = 0.0;
  double decay_slope = 0.0;  // log-error fit over [0.05 T, first off-toggle or T]
  double decay_fit_t0 = 0.0;
  double decay_fit_t1 = 0.0;
  std::vector<double> omega_hat_error;  // adaptive: max_j |w^_ij - w_ij| per node
  GainCertificate certificate;
  double error_energy_full = 0.0;
  double error_energy_window = 0.0;
  double noise_energy_full = 0.0;
  double noise_energy_window = 0.0;
  double wall_seconds = 0.0;
};

struct RunResult {
  Trace trace;
  RunSummary summary;
};

/// Validates (graph and disturbance requirements, Hurwitz designs; the gain
/// certificate is logged as an event), integrates, and post-processes.
/// Deterministic given the config and seed.
RunResult run_scenario(const ScenarioConfig& cfg);

std::string summary_to_string(const ScenarioConfig& cfg, const RunSummary& s);

}  // namespace dlsq
