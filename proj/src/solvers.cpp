#include "dlsq/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "dlsq/kernels.hpp"

namespace dlsq {

const char* to_string(CompensatorMode mode) {
  switch (mode) {
    case CompensatorMode::None: return "none";
    case CompensatorMode::KnownFreq: return "known_freq";
    case CompensatorMode::Adaptive: return "adaptive";
    case CompensatorMode::Washout: return "washout";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// HoldNoise
// ---------------------------------------------------------------------------

HoldNoise::HoldNoise(int node_count, double t_end, double sigma, double hold_dt,
                     std::uint64_t seed)
    : sigma_(sigma), hold_dt_(hold_dt), node_count_(node_count) {
  if (sigma < 0.0) throw ValidationError("noise: sigma must be nonnegative");
  if (!(hold_dt > 0.0)) throw ValidationError("noise: hold_dt must be positive");
  if (sigma_ == 0.0) return;
  const auto intervals = static_cast<std::size_t>(std::ceil(t_end / hold_dt)) + 1;
  samples_.resize(intervals * node_count);
  Rng rng(seed);
  const double bound = std::sqrt(3.0) * sigma;  // RMS of U(-b, b) is b/sqrt(3)
  for (auto& s : samples_) s = rng.uniform(-bound, bound);
}

double HoldNoise::value(int node, double t) const {
  if (sigma_ == 0.0) return 0.0;
  const auto intervals = samples_.size() / node_count_;
  auto idx = static_cast<std::size_t>(std::max(t, 0.0) / hold_dt_);
  if (idx >= intervals) idx = intervals - 1;
  return samples_[idx * node_count_ + node];
}

double HoldNoise::energy(double t0, double t1) const {
  if (sigma_ == 0.0 || t1 <= t0) return 0.0;
  const auto intervals = samples_.size() / node_count_;
  double total = 0.0;
  for (std::size_t k = 0; k < intervals; ++k) {
    const double lo = std::max(t0, static_cast<double>(k) * hold_dt_);
    const double hi = std::min(t1, static_cast<double>(k + 1) * hold_dt_);
    if (hi <= lo) continue;
    double sq = 0.0;
    for (int i = 0; i < node_count_; ++i) {
      const double w = samples_[k * node_count_ + i];
      sq += w * w;
    }
    total += (hi - lo) * sq;
  }
  return total;
}

// ---------------------------------------------------------------------------
// StateLayout
// ---------------------------------------------------------------------------

int StateLayout::filter_offset(int i) const {
  int off = 2 * node_count * dimension;
  for (int j = 0; j < i; ++j) off += filter_dim[j];
  return off;
}

int StateLayout::alpha_offset(int i) const {
  int off = 2 * node_count * dimension;
  for (int j = 0; j < node_count; ++j) off += filter_dim[j];
  for (int j = 0; j < i; ++j) off += alpha_dim[j];
  return off;
}

// ---------------------------------------------------------------------------
// SolverEngine
// ---------------------------------------------------------------------------

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace

SolverEngine::SolverEngine(LsqProblem problem, Digraph graph, DisturbanceSpec disturbance,
                           SolverCore core, SolverGains gains, CompensatorConfig comp,
                           HoldNoise noise)
    : problem_(std::move(problem)),
      graph_(std::move(graph)),
      disturbance_(std::move(disturbance)),
      core_(core),
      gains_(gains),
      comp_(std::move(comp)),
      noise_(std::move(noise)) {
  const int n = problem_.node_count();
  require(graph_.node_count() == n, "solver: graph has " + std::to_string(graph_.node_count()) +
                                        " nodes but the problem has " + std::to_string(n));
  require(disturbance_.node_count() == 0 || disturbance_.node_count() == n,
          "solver: disturbance spec node count mismatch");
  require(gains_.kappa1 > 0.0 && gains_.kappa2 > 0.0, "solver: gains must be positive");

  const auto balance = is_weight_balanced(graph_);
  require(balance.balanced, "solver: graph must be weight-balanced");
  require(is_strongly_connected(graph_), "solver: graph must be strongly connected");

  if (core_ == SolverCore::Undirected) {
    require((graph_.weights() - graph_.weights().transpose()).cwiseAbs().maxCoeff() == 0.0,
            "solver: undirected variant requires a symmetric adjacency matrix");
    require(gains_.kappa1 == 1.0 && gains_.kappa2 == 1.0,
            "solver: undirected variant fixes kappa1 = kappa2 = 1");
  }

  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& ev : comp_.schedule) {
    require(ev.time > prev, "solver: toggle schedule times must be strictly increasing");
    prev = ev.time;
  }

  lap_ = laplacian(graph_);

  layout_.node_count = n;
  layout_.dimension = problem_.dimension();
  layout_.filter_dim.assign(n, 0);
  layout_.alpha_dim.assign(n, 0);

  const auto node_k = [&](int i) {
    return disturbance_.node_count() == 0 ? 0 : disturbance_.sinusoid_count(i);
  };

  switch (comp_.mode) {
    case CompensatorMode::None:
      break;
    case CompensatorMode::Washout:
      require(comp_.washout_pole > 0.0, "solver: washout pole must be positive");
      for (int i = 0; i < n; ++i) layout_.filter_dim[i] = 1;
      break;
    case CompensatorMode::KnownFreq: {
      require(static_cast<int>(comp_.observer_gains.size()) == n,
              "solver: known_freq needs one observer gain column per node");
      for (int i = 0; i < n; ++i) {
        const int k = node_k(i);
        const int dim = 2 * k + 1;
        layout_.filter_dim[i] = dim;
        const auto& gain = comp_.observer_gains[i];
        require(gain.size() == dim, "solver: observer gain for node " + std::to_string(i + 1) +
                                        " must have " + std::to_string(dim) + " entries");
        std::vector<double> freqs(k);
        if (k > 0)
          for (int j = 0; j < k; ++j) freqs[j] = disturbance_.node(i)[j].frequency;
        const Eigen::MatrixXd s = exosystem_matrix(freqs);
        const Eigen::RowVectorXd d = exosystem_output_row(k);
        const Eigen::MatrixXd s_tilde = s - gain * d;
        const auto rep = check_hurwitz(s_tilde);
        if (!rep.hurwitz) {
          std::string msg = "solver: observer for node " + std::to_string(i + 1) +
                            " is not Hurwitz; offending eigenvalues:";
          for (const auto& l : rep.offending)
            msg += " (" + std::to_string(l.real()) + (l.imag() >= 0 ? "+" : "") +
                   std::to_string(l.imag()) + "i)";
          throw ValidationError(msg);
        }
        const auto syl = solve_sylvester(s, s_tilde, gain, d);
        require(syl.ok, "solver: observer Sylvester solve failed for node " +
                            std::to_string(i + 1) + " (" + syl.reason + ")");
        observer_S_.push_back(s_tilde);
        observer_B_.push_back(gain);
        exo_output_row_.push_back(d);
        comp_selector_.push_back(compensation_row(k));
        // D0 T^-1 via T^T x = D0^T
        comp_row_const_.push_back(
            syl.T.transpose().partialPivLu().solve(compensation_row(k).transpose()).transpose());
      }
      break;
    }
    case CompensatorMode::Adaptive: {
      require(disturbance_.node_count() == n,
              "solver: adaptive mode needs a disturbance spec for every node");
      require(comp_.sylvester_stride >= 1, "solver: sylvester_stride must be >= 1");
      require(comp_.conditioning_gate > 0.0 && comp_.conditioning_gate < 1.0,
              "solver: conditioning gate must lie in (0, 1)");
      require(comp_.learning_rates.size() == 1 ||
                  static_cast<int>(comp_.learning_rates.size()) == n,
              "solver: learning_rate must be shared or per node");
      for (double l : comp_.learning_rates)
        require(l > 0.0, "solver: learning rates must be positive");
      require(comp_.normalization_weight >= 0.0,
              "solver: normalization weight must be nonnegative");
      require(comp_.alpha_hat_init.empty() ||
                  static_cast<int>(comp_.alpha_hat_init.size()) == n,
              "solver: alpha_hat_init must be empty or per node");
      for (int i = 0; i < n; ++i) {
        const int k = node_k(i);
        require(k >= 1, "solver: adaptive mode needs at least one sinusoid per node (node " +
                            std::to_string(i + 1) + ")");
        Eigen::VectorXd coeffs;
        if (!comp_.filter_coeffs_per_node.empty()) {
          require(static_cast<int>(comp_.filter_coeffs_per_node.size()) == n,
                  "solver: per-node filter coefficients must cover every node");
          coeffs = comp_.filter_coeffs_per_node[i];
        } else {
          coeffs = comp_.filter_coeffs;
        }
        filters_.emplace_back(k, coeffs);  // validates Hurwitz
        layout_.filter_dim[i] = 2 * k + 1;
        layout_.alpha_dim[i] = k;
        if (!comp_.alpha_hat_init.empty())
          require(comp_.alpha_hat_init[i].size() == k,
                  "solver: alpha_hat_init for node " + std::to_string(i + 1) + " must have " +
                      std::to_string(k) + " entries");
        exo_output_row_.push_back(exosystem_output_row(k));
        comp_selector_.push_back(compensation_row(k));
        comp_row_.push_back(Eigen::RowVectorXd::Zero(2 * k + 1));
        comp_valid_.push_back(false);
        omega_hat_.emplace_back(k, 0.0);
      }
      break;
    }
  }

  int total = 2 * n * layout_.dimension;
  for (int i = 0; i < n; ++i) total += layout_.filter_dim[i] + layout_.alpha_dim[i];
  layout_.total = total;

  xo_.resize(n * layout_.dimension);
  vo_.resize(n * layout_.dimension);
}

double SolverEngine::measurement(int node, double t) const {
  double z = problem_.nominal()(node);
  if (disturbance_.node_count() > 0) z += eval_disturbance(disturbance_, node, t);
  if (noise_.enabled()) z += noise_.value(node, t);
  return z;
}

bool SolverEngine::rejection_active(double t) const {
  bool active = true;
  for (const auto& ev : comp_.schedule) {
    if (t > ev.time)
      active = ev.on;
    else
      break;
  }
  return active;
}

double SolverEngine::compensation(int node, double t, std::span<const double> state) const {
  if (comp_.mode == CompensatorMode::None) return 0.0;
  if (!rejection_active(t)) return 0.0;
  const int foff = layout_.filter_offset(node);
  switch (comp_.mode) {
    case CompensatorMode::KnownFreq: {
      const auto& row = comp_row_const_[node];
      return kernels::dot(row.size(), row.data(), state.data() + foff);
    }
    case CompensatorMode::Adaptive: {
      if (!comp_valid_[node]) return 0.0;
      const auto& row = comp_row_[node];
      return kernels::dot(row.size(), row.data(), state.data() + foff);
    }
    case CompensatorMode::Washout:
      return measurement(node, t) - comp_.washout_pole * state[foff];
    default:
      return 0.0;
  }
}

double SolverEngine::identifier_error_at(int node, double t,
                                         std::span<const double> state) const {
  if (comp_.mode != CompensatorMode::Adaptive) return 0.0;
  const auto& f = filters_[node];
  const Eigen::Map<const Eigen::VectorXd> eta(state.data() + layout_.filter_offset(node), f.dim());
  const Eigen::Map<const Eigen::VectorXd> alpha(state.data() + layout_.alpha_offset(node), f.k());
  return identifier_output(f, alpha, eta) - measurement(node, t);
}

Eigen::VectorXd SolverEngine::initial_state(Rng& rng, double range) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(layout_.total);
  const int n = layout_.node_count;
  const int m = layout_.dimension;
  for (int i = 0; i < 2 * n * m; ++i) y(i) = rng.uniform(-range, range);
  for (int i = 0; i < n; ++i) {
    const int foff = layout_.filter_offset(i);
    for (int j = 0; j < layout_.filter_dim[i]; ++j) y(foff + j) = rng.uniform(-range, range);
  }
  if (comp_.mode == CompensatorMode::Adaptive && !comp_.alpha_hat_init.empty()) {
    for (int i = 0; i < n; ++i) {
      const int aoff = layout_.alpha_offset(i);
      for (int j = 0; j < layout_.alpha_dim[i]; ++j) y(aoff + j) = comp_.alpha_hat_init[i](j);
    }
  }
  return y;
}

void SolverEngine::refresh_compensation(double t, std::span<const double> y) {
  const double stride_hit = step_count_ % static_cast<std::size_t>(comp_.sylvester_stride);
  ++step_count_;
  if (stride_hit != 0) return;

  for (int i = 0; i < layout_.node_count; ++i) {
    const auto& f = filters_[i];
    const int k = f.k();
    const Eigen::Map<const Eigen::VectorXd> alpha(y.data() + layout_.alpha_offset(i), k);
    PolyCoeffs coeffs;
    coeffs.alpha = alpha;
    bool valid = false;
    std::string why;
    const auto rec = freqs_from_poly(coeffs);
    if (rec.ok) {
      const Eigen::MatrixXd s_check = exosystem_matrix(rec.omega);
      const auto syl = solve_sylvester(s_check, f.S(), f.B(), exo_output_row_[i]);
      if (syl.ok && syl.sigma_min >= comp_.conditioning_gate * syl.sigma_max) {
        comp_row_[i] =
            syl.T.transpose().partialPivLu().solve(comp_selector_[i].transpose()).transpose();
        omega_hat_[i] = rec.omega;
        valid = true;
      } else {
        why = syl.ok ? "ill-conditioned T" : syl.reason;
      }
    } else {
      why = rec.reason;
    }
    if (valid != comp_valid_[i]) {
      events_.push_back({t, i, valid ? "compensation accepted (omega_hat refreshed)"
                                     : "compensation fallback: " + why});
      comp_valid_[i] = valid;
    }
    if (!valid) comp_row_[i].setZero();
  }
}

void SolverEngine::rhs(double t, std::span<const double> y, std::span<double> dy) {
  const int n = layout_.node_count;
  const int m = layout_.dimension;
  const double k1 = gains_.kappa1;
  const double k2 = gains_.kappa2;

  // x_o = (L (x) I_m) x, v_o likewise
  xo_.setZero();
  vo_.setZero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = lap_(i, j);
      if (w == 0.0) continue;
      kernels::axpy(m, w, y.data() + layout_.x_offset(j), xo_.data() + i * m);
      kernels::axpy(m, w, y.data() + layout_.v_offset(j), vo_.data() + i * m);
    }

  const bool active = rejection_active(t);

  for (int i = 0; i < n; ++i) {
    const double* xi = y.data() + layout_.x_offset(i);
    double* dxi = dy.data() + layout_.x_offset(i);
    double* dvi = dy.data() + layout_.v_offset(i);
    const Eigen::RowVectorXd hi = problem_.row(i);

    const double z_tilde = measurement(i, t);
    double comp = 0.0;
    const int foff = layout_.filter_offset(i);
    switch (comp_.mode) {
      case CompensatorMode::None:
        break;
      case CompensatorMode::KnownFreq:
        if (active) {
          const auto& row = comp_row_const_[i];
          comp = kernels::dot(row.size(), row.data(), y.data() + foff);
        }
        break;
      case CompensatorMode::Adaptive:
        if (active && comp_valid_[i]) {
          const auto& row = comp_row_[i];
          comp = kernels::dot(row.size(), row.data(), y.data() + foff);
        }
        break;
      case CompensatorMode::Washout:
        if (active) comp = z_tilde - comp_.washout_pole * y[foff];
        break;
    }
    const double z_eff = z_tilde - comp;

    const double innovation = kernels::dot(m, hi.data(), xi) - z_eff;
    for (int c = 0; c < m; ++c)
      dxi[c] = -k1 * hi(c) * innovation - (k1 + k2) * xo_(i * m + c) - vo_(i * m + c);
    for (int c = 0; c < m; ++c) dvi[c] = k1 * k2 * xo_(i * m + c);

    // mode-specific state blocks (observers/filters run on the raw measurement)
    switch (comp_.mode) {
      case CompensatorMode::None:
        break;
      case CompensatorMode::KnownFreq: {
        const int dim = layout_.filter_dim[i];
        const Eigen::Map<const Eigen::VectorXd> eta(y.data() + foff, dim);
        Eigen::Map<Eigen::VectorXd> deta(dy.data() + foff, dim);
        deta = observer_S_[i] * eta + observer_B_[i] * z_tilde;
        break;
      }
      case CompensatorMode::Adaptive: {
        const auto& f = filters_[i];
        const Eigen::Map<const Eigen::VectorXd> eta(y.data() + foff, f.dim());
        Eigen::Map<Eigen::VectorXd> deta(dy.data() + foff, f.dim());
        deta = f.S() * eta + f.B() * z_tilde;
        const Eigen::Map<const Eigen::VectorXd> alpha(y.data() + layout_.alpha_offset(i), f.k());
        Eigen::Map<Eigen::VectorXd> dalpha(dy.data() + layout_.alpha_offset(i), f.k());
        const double err = identifier_output(f, alpha, eta) - z_tilde;
        IdentifierParams params;
        params.learning_rate = comp_.learning_rates.size() == 1 ? comp_.learning_rates[0]
                                                                : comp_.learning_rates[i];
        params.normalization_weight = comp_.normalization_weight;
        dalpha = gradient_update_rhs(params, err, eta, f);
        break;
      }
      case CompensatorMode::Washout:
        dy[foff] = -comp_.washout_pole * y[foff] + z_tilde;
        break;
    }
  }
}

OdeSystem SolverEngine::ode() {
  OdeSystem sys;
  sys.state_dim = layout_.total;
  sys.rhs = [this](double t, std::span<const double> y, std::span<double> dy) {
    this->rhs(t, y, dy);
  };
  if (comp_.mode == CompensatorMode::Adaptive) {
    sys.on_step_start = [this](double t, std::span<const double> y) {
      this->refresh_compensation(t, y);
    };
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

SolverEngine make_exact_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                               DisturbanceSpec disturbance, HoldNoise noise) {
  CompensatorConfig comp;
  comp.mode = CompensatorMode::None;
  return SolverEngine(std::move(problem), std::move(graph), std::move(disturbance),
                      SolverCore::Exact, gains, std::move(comp), std::move(noise));
}

SolverEngine make_undirected_solver(LsqProblem problem, Digraph graph,
                                    DisturbanceSpec disturbance) {
  CompensatorConfig comp;
  comp.mode = CompensatorMode::None;
  return SolverEngine(std::move(problem), std::move(graph), std::move(disturbance),
                      SolverCore::Undirected, SolverGains{1.0, 1.0}, std::move(comp), {});
}

SolverEngine make_known_freq_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                                    DisturbanceSpec disturbance,
                                    std::vector<Eigen::VectorXd> observer_gains,
                                    std::vector<ToggleEvent> schedule, HoldNoise noise) {
  CompensatorConfig comp;
  comp.mode = CompensatorMode::KnownFreq;
  comp.observer_gains = std::move(observer_gains);
  comp.schedule = std::move(schedule);
  return SolverEngine(std::move(problem), std::move(graph), std::move(disturbance),
                      SolverCore::Exact, gains, std::move(comp), std::move(noise));
}

SolverEngine make_adaptive_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                                  DisturbanceSpec disturbance, CompensatorConfig comp,
                                  HoldNoise noise) {
  comp.mode = CompensatorMode::Adaptive;
  if (comp.learning_rates.empty()) comp.learning_rates = {1.0};
  return SolverEngine(std::move(problem), std::move(graph), std::move(disturbance),
                      SolverCore::Exact, gains, std::move(comp), std::move(noise));
}

SolverEngine make_washout_solver(LsqProblem problem, Digraph graph, SolverGains gains,
                                 DisturbanceSpec disturbance, double washout_pole,
                                 std::vector<ToggleEvent> schedule, HoldNoise noise) {
  CompensatorConfig comp;
  comp.mode = CompensatorMode::Washout;
  comp.washout_pole = washout_pole;
  comp.schedule = std::move(schedule);
  return SolverEngine(std::move(problem), std::move(graph), std::move(disturbance),
                      SolverCore::Exact, gains, std::move(comp), std::move(noise));
}

}  // namespace dlsq
