#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dlsq/common.hpp"

namespace dlsq {

// ---------------------------------------------------------------------------
// Fixed-step ODE integration
// ---------------------------------------------------------------------------

/// Right-hand side of a stacked ODE. `rhs` must not mutate anything but the
/// derivative output; `on_step_start`, when set, is invoked once per
/// integration step before the first stage (used to refresh cached
/// per-step quantities such as the adaptive compensation rows).
struct OdeSystem {
  int state_dim = 0;
  std::function<void(double t, std::span<const double> y, std::span<double> dy)> rhs;
  std::function<void(double t, std::span<const double> y)> on_step_start;
};

/// Receives (t, state) at step 0, every `decimation`-th step, and the final
/// step. `step_index` counts integration steps from 0 at t0.
using TraceSink = std::function<void(std::size_t step_index, double t, std::span<const double> y)>;

/// Classic RK4 with fixed step dt; the last step is shortened so t1 is hit
/// exactly. Throws NumericalError with the current time if the state stops
/// being finite.
Eigen::VectorXd integrate(const OdeSystem& sys, double t0, double t1, double dt,
                          const Eigen::VectorXd& y0, const TraceSink& sink = {},
                          std::size_t decimation = 1);

// ---------------------------------------------------------------------------
// Sylvester equation  T*Sc - St*T = B*D
// ---------------------------------------------------------------------------

struct SylvesterSolution {
  bool ok = false;
  Eigen::MatrixXd T;
  double residual_norm = 0.0;  // ||T*Sc - St*T - B*D||_F
  double sigma_min = 0.0;      // smallest singular value of T
  double sigma_max = 0.0;
  std::string reason;          // set when !ok
};

/// Solves via the vectorized linear system (Sc^T (x) I - I (x) St).
/// Fails structurally (ok=false) when the solve is near singular (common
/// eigenvalues of Sc and St) or when T itself is numerically singular.
SylvesterSolution solve_sylvester(const Eigen::MatrixXd& s_check,
                                  const Eigen::MatrixXd& s_tilde,
                                  const Eigen::VectorXd& b,
                                  const Eigen::RowVectorXd& d);

// ---------------------------------------------------------------------------
// Observability
// ---------------------------------------------------------------------------

/// Stacked [D; D*S; ...; D*S^(n-1)] for a single-output pair.
Eigen::MatrixXd observability_matrix(const Eigen::RowVectorXd& d, const Eigen::MatrixXd& s);

/// Parallel-connection observability of two observable single-output pairs:
/// true iff the spectra of a1 and a2 are disjoint. Throws ValidationError if
/// either pair is itself unobservable.
bool parallel_observability_check(const Eigen::RowVectorXd& psi1, const Eigen::MatrixXd& a1,
                                  const Eigen::RowVectorXd& psi2, const Eigen::MatrixXd& a2);

// ---------------------------------------------------------------------------
// Small dense helpers
// ---------------------------------------------------------------------------

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

/// Roots of c0 + c1*s + ... + c_{n-1}*s^(n-1) + s^n (monic, coeffs low->high
/// excluding the leading 1), via the companion matrix.
std::vector<std::complex<double>> poly_roots_monic(const Eigen::VectorXd& coeffs_low_to_high);

struct HurwitzReport {
  bool hurwitz = false;
  std::vector<std::complex<double>> offending;  // eigenvalues with Re >= 0
  std::vector<std::complex<double>> all;
};
HurwitzReport check_hurwitz(const Eigen::MatrixXd& m);

/// Numerical rank from singular values, relative threshold.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

}  // namespace dlsq
