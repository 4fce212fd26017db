#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dlsq/common.hpp"

namespace dlsq {

struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s, strictly positive
  double phase = 0.0;      // rad
};

/// Per-node multi-sinusoidal measurement disturbance
/// eps_i(t) = sum_j A_ij sin(w_ij t + phi_ij). Frequencies within a node
/// must be distinct and strictly positive.
class DisturbanceSpec {
 public:
  explicit DisturbanceSpec(std::vector<std::vector<Sinusoid>> per_node);

  int node_count() const { return static_cast<int>(per_node_.size()); }
  const std::vector<Sinusoid>& node(int i) const { return per_node_.at(i); }
  int sinusoid_count(int i) const { return static_cast<int>(per_node_.at(i).size()); }

 private:
  std::vector<std::vector<Sinusoid>> per_node_;
};

double eval_disturbance(const DisturbanceSpec& spec, int node, double t);

/// Marginally stable realization of z_i + eps_i(t):
///   eta' = S eta, output D eta, with S = blkdiag(0, [[0,w],[-w,0]], ...) and
///   D = [1 1 0 1 0 ...]. eta0 packs (z_i, A_j sin phi_j, A_j cos phi_j).
struct Exosystem {
  Eigen::MatrixXd S;
  Eigen::RowVectorXd D;
  Eigen::VectorXd eta0;
};

Exosystem build_exosystem(const std::vector<Sinusoid>& sinusoids, double nominal);

/// Skew block-diagonal S for a plain frequency list (used for the
/// estimate-driven matrix in the adaptive compensator).
Eigen::MatrixXd exosystem_matrix(const std::vector<double>& frequencies);
Eigen::RowVectorXd exosystem_output_row(int k);

/// Coefficients (alpha_1 ... alpha_k) of
/// p(s) = prod_j (s^2 + w_j^2) = s^2k + alpha_k s^(2k-2) + ... + alpha_1.
struct PolyCoeffs {
  Eigen::VectorXd alpha;
  int order() const { return static_cast<int>(alpha.size()); }
};

PolyCoeffs poly_from_freqs(const std::vector<double>& frequencies);

/// Inverse of poly_from_freqs on transient estimates. Roots lambda of
/// lambda^k + alpha_k lambda^(k-1) + ... + alpha_1 map to w = sqrt(-Re lambda)
/// when real negative; any nonnegative or significantly complex root yields
/// a "not yet identifiable" outcome instead of an error.
struct FreqRecovery {
  bool ok = false;
  std::vector<double> omega;  // ascending when ok
  std::string reason;
};

FreqRecovery freqs_from_poly(const PolyCoeffs& coeffs);

/// Observer-canonical companion realization: S0 = [[0, I_2k], [0, p]] with
/// p = -[alpha_1 0 alpha_2 0 ... alpha_k 0], output row D0 = [1 0 ... 0].
/// char(S0) = s * p(s).
struct CompanionForm {
  Eigen::MatrixXd S0;
  Eigen::RowVectorXd D0;
};

CompanionForm companion_form(const PolyCoeffs& coeffs);

/// Row [0 1 0 1 0 ... 1 0] selecting the sinusoidal part of an exosystem
/// state (the compensation row used by the disturbance-rejecting solvers).
Eigen::RowVectorXd compensation_row(int k);

}  // namespace dlsq
