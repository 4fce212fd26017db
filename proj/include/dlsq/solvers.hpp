#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dlsq/common.hpp"
#include "dlsq/disturbance.hpp"
#include "dlsq/graph.hpp"
#include "dlsq/identifier.hpp"
#include "dlsq/numerics.hpp"
#include "dlsq/problem.hpp"

namespace dlsq {

enum class SolverCore { Exact, Undirected };
enum class CompensatorMode { None, KnownFreq, Adaptive, Washout };

const char* to_string(CompensatorMode mode);

/// (time, on/off) events for the disturbance-rejection term; times strictly
/// increasing. The compensation starts enabled; observers/filters keep
/// integrating while the term is switched off.
struct ToggleEvent {
  double time = 0.0;
  bool on = false;
};

struct SolverGains {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
};

/// Piecewise-constant bounded noise: uniform on [-sqrt(3) sigma, sqrt(3) sigma]
/// per node per hold interval (RMS exactly sigma), pregenerated from a seed.
class HoldNoise {
 public:
  HoldNoise() = default;
  HoldNoise(int node_count, double t_end, double sigma, double hold_dt, std::uint64_t seed);

  bool enabled() const { return sigma_ > 0.0; }
  double value(int node, double t) const;
  /// integral of |w(t)|^2 over [t0, t1] (exact for the held signal)
  double energy(double t0, double t1) const;

 private:
  double sigma_ = 0.0;
  double hold_dt_ = 0.1;
  int node_count_ = 0;
  std::vector<double> samples_;  // interval-major, node-minor
};

struct CompensatorConfig {
  CompensatorMode mode = CompensatorMode::None;
  std::vector<ToggleEvent> schedule;

  // known-frequency observers: per-node gain columns K_i (size 2 k_i + 1)
  std::vector<Eigen::VectorXd> observer_gains;

  // adaptive identifier
  Eigen::VectorXd filter_coeffs;                 // shared design (2k+1)
  std::vector<Eigen::VectorXd> filter_coeffs_per_node;  // optional override
  std::vector<double> learning_rates;            // size 1 (shared) or N
  double normalization_weight = 0.0;
  std::vector<Eigen::VectorXd> alpha_hat_init;   // per node; empty = zeros
  int sylvester_stride = 1;
  /// acceptance gate on the Sylvester solution: sigma_min >= gate * sigma_max
  double conditioning_gate = 1e-2;

  double washout_pole = 0.4;
};

/// Offsets into the stacked simulation state
/// [ x_1..x_N | v_1..v_N | per-node filter/observer states | per-node alpha ].
struct StateLayout {
  int node_count = 0;
  int dimension = 0;  // m
  std::vector<int> filter_dim;  // per node; 0 when the mode has no such block
  std::vector<int> alpha_dim;
  int total = 0;

  int x_offset(int i) const { return i * dimension; }
  int v_offset(int i) const { return (node_count + i) * dimension; }
  int filter_offset(int i) const;
  int alpha_offset(int i) const;
};

struct SolverEvent {
  double time = 0.0;
  int node = -1;  // -1 = global
  std::string what;
};

/// Assembles the right-hand side of one solver variant over the stacked
/// state and owns the per-run mutable pieces (adaptive compensation cache,
/// event log). One engine drives one integration run; independent runs use
/// independent engines.
class SolverEngine {
 public:
  SolverEngine(LsqProblem problem, Digraph graph, DisturbanceSpec disturbance,
               SolverCore core, SolverGains gains, CompensatorConfig comp,
               HoldNoise noise = {});

  const StateLayout& layout() const { return layout_; }
  const LsqProblem& problem() const { return problem_; }
  CompensatorMode mode() const { return comp_.mode; }
  int filter_order(int node) const { return layout_.filter_dim[node]; }
  int alpha_order(int node) const { return layout_.alpha_dim[node]; }

  /// Noisy measurement z~_i(t) = z_i + eps_i(t) + w_i(t).
  double measurement(int node, double t) const;

  /// True whenever the rejection term is enabled by the toggle schedule.
  bool rejection_active(double t) const;

  /// Amount subtracted from z~_i before it enters the primal-dual update
  /// (0 when the mode has no compensation or the schedule switched it off).
  double compensation(int node, double t, std::span<const double> state) const;

  /// Last accepted frequency estimates for one node (adaptive mode);
  /// zeros before the first accepted recovery.
  const std::vector<double>& omega_hat(int node) const { return omega_hat_.at(node); }

  /// Identifier error e_i = z^_oi - z~_i (adaptive mode).
  double identifier_error_at(int node, double t, std::span<const double> state) const;

  Eigen::VectorXd initial_state(Rng& rng, double range) const;

  OdeSystem ode();

  const std::vector<SolverEvent>& events() const { return events_; }

 private:
  void rhs(double t, std::span<const double> y, std::span<double> dy);
  void refresh_compensation(double t, std::span<const double> y);

  LsqProblem problem_;
  Digraph graph_;
  DisturbanceSpec disturbance_;
  SolverCore core_;
  SolverGains gains_;
  CompensatorConfig comp_;
  HoldNoise noise_;
  StateLayout layout_;

  // precomputed
  Eigen::MatrixXd lap_;
  std::vector<FilterBank> filters_;                 // adaptive
  std::vector<Eigen::MatrixXd> observer_S_;         // known-freq S~_i
  std::vector<Eigen::VectorXd> observer_B_;         // known-freq B_i = K_i
  std::vector<Eigen::RowVectorXd> comp_row_const_;  // known-freq D0 T^-1
  std::vector<Eigen::RowVectorXd> exo_output_row_;  // D_i of the true exosystem
  std::vector<Eigen::RowVectorXd> comp_selector_;   // [0 1 0 ... 1 0]

  // adaptive per-step cache
  std::vector<Eigen::RowVectorXd> comp_row_;        // D0 T^-1, zero when invalid
  std::vector<bool> comp_valid_;
  std::vector<std::vector<double>> omega_hat_;
  std::size_t step_count_ = 0;

  std::vector<SolverEvent> events_;

  // workspaces
  Eigen::VectorXd xo_, vo_;
};

/// Factories for the solver variants (validation happens here).
SolverEngine make_exact_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                               DisturbanceSpec disturbance = DisturbanceSpec({}),
                               HoldNoise noise = {});
SolverEngine make_undirected_solver(LsqProblem problem, Digraph graph,
                                    DisturbanceSpec disturbance = DisturbanceSpec({}));
SolverEngine make_known_freq_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                                    DisturbanceSpec disturbance,
                                    std::vector<Eigen::VectorXd> observer_gains,
                                    std::vector<ToggleEvent> schedule = {},
                                    HoldNoise noise = {});
SolverEngine make_adaptive_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                                  DisturbanceSpec disturbance, CompensatorConfig comp,
                                  HoldNoise noise = {});
SolverEngine make_washout_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                                 DisturbanceSpec disturbance, double washout_pole,
                                 std::vector<ToggleEvent> schedule = {}, HoldNoise noise = {});

}  // namespace dlsq
