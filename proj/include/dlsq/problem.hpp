#pragma once

#include <Eigen/Core>

#include "dlsq/common.hpp"
#include "dlsq/graph.hpp"

namespace dlsq {

/// Row-partitioned linear equation data: node i owns the single row H_i and
/// the nominal scalar measurement z_i.
class LsqProblem {
 public:
  /// rows: N x m stacked H (one row per node), nominal: z. Throws when the
  /// stacked matrix is rank deficient (smallest singular value below
  /// 1e-10 times the largest) or N < m.
  LsqProblem(Eigen::MatrixXd rows, Eigen::VectorXd nominal);

  int node_count() const { return static_cast<int>(rows_.rows()); }
  int dimension() const { return static_cast<int>(rows_.cols()); }
  const Eigen::MatrixXd& stacked() const { return rows_; }
  Eigen::RowVectorXd row(int i) const { return rows_.row(i); }
  const Eigen::VectorXd& nominal() const { return nominal_; }

  /// Unique least squares solution, computed by Householder QR.
  Eigen::VectorXd least_squares_oracle() const;

  /// (lambda_h, lambda_H): extreme eigenvalues of H^T H.
  std::pair<double, double> lambda_bounds() const;

 private:
  Eigen::MatrixXd rows_;
  Eigen::VectorXd nominal_;
};

/// Sufficient-gain certificate: kappa_1 >= 1 and
/// kappa_2 >= 6 N lambda_hi^4 kappa_1^2 / lambda_lo^4 * max(1, 1/lambda_lo),
/// with lambda_lo = min(lambda_2, lambda_h), lambda_hi = max(lambda_N, lambda_H).
/// The bound is sufficient only; an unsatisfied certificate is advisory.
struct GainCertificate {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double lambda_lower = 0.0;
  double lambda_upper = 0.0;
  double kappa2_bound = 0.0;
  bool satisfied = false;
};

GainCertificate certify_gains(double kappa1, double kappa2, const GraphSpectrum& spec,
                              const LsqProblem& problem);

}  // namespace dlsq
