#pragma once

#include <Eigen/Core>
#include <vector>

#include "dlsq/common.hpp"

namespace dlsq {

/// Stable companion-form filter driven by the noisy measurement:
///   eta~' = S~ eta~ + B z~,  B = [0 ... 0 1]^T.
/// design coefficients, in order: (b0, a1, b1, ..., ak, bk), give the last
/// row [-b0, -a1, -b1, ..., -ak, -bk]; the characteristic polynomial is
/// s^(2k+1) + bk s^(2k) + ak s^(2k-1) + ... + a1 s + b0 and must be Hurwitz.
///
/// State index convention (1-based, as used throughout): the gradient
/// regressor eta~_o stacks the even-index components (eta~_2, eta~_4, ...,
/// eta~_2k) -- the positions multiplied by the alpha estimates in the
/// identifier output row. For k = 1 that is the single component eta~_2.
class FilterBank {
 public:
  /// coeffs: 2k+1 design coefficients. Throws ValidationError listing the
  /// offending eigenvalues when the companion matrix is not Hurwitz.
  FilterBank(int k, const Eigen::VectorXd& coeffs);

  int k() const { return k_; }
  int dim() const { return 2 * k_ + 1; }
  const Eigen::MatrixXd& S() const { return s_; }
  const Eigen::VectorXd& B() const { return b_; }
  const Eigen::VectorXd& design() const { return coeffs_; }

 private:
  int k_;
  Eigen::VectorXd coeffs_;
  Eigen::MatrixXd s_;
  Eigen::VectorXd b_;
};

/// S~ eta~ + B z~ (the filter block of every identifier-based solver).
Eigen::VectorXd filter_step_rhs(const FilterBank& f, const Eigen::VectorXd& eta, double z_tilde);

/// [b0, a1 - alpha^_1, b1, ..., ak - alpha^_k, bk] * eta~.
double identifier_output(const FilterBank& f, const Eigen::VectorXd& alpha_hat,
                         const Eigen::VectorXd& eta);

inline double identifier_error(double z_hat_o, double z_tilde) { return z_hat_o - z_tilde; }

/// Gradient estimator parameters; normalization_weight = 0 selects the
/// plain gradient rule, > 0 the normalized one.
struct IdentifierParams {
  double learning_rate = 1.0;
  double normalization_weight = 0.0;
};

/// Regressor (eta~_2, eta~_4, ..., eta~_2k).
Eigen::VectorXd identifier_regressor(const FilterBank& f, const Eigen::VectorXd& eta);

/// alpha^' = l e eta~_o or l e eta~_o / (1 + nu |eta~_o|^2).
Eigen::VectorXd gradient_update_rhs(const IdentifierParams& params, double error,
                                    const Eigen::VectorXd& eta, const FilterBank& f);

}  // namespace dlsq
