#include "dlsq/problem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <string>

namespace dlsq {

LsqProblem::LsqProblem(Eigen::MatrixXd rows, Eigen::VectorXd nominal)
    : rows_(std::move(rows)), nominal_(std::move(nominal)) {
  if (rows_.rows() == 0 || rows_.cols() == 0)
    throw ValidationError("problem: H must be non-empty");
  if (nominal_.size() != rows_.rows())
    throw ValidationError("problem: z length (" + std::to_string(nominal_.size()) +
                          ") must match the number of rows of H (" +
                          std::to_string(rows_.rows()) + ")");
  if (rows_.rows() < rows_.cols())
    throw ValidationError("problem: need at least m rows for full column rank");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows_);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0))
    throw ValidationError("problem: H is rank deficient (sigma_min/sigma_max = " +
                          std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
}

Eigen::VectorXd LsqProblem::least_squares_oracle() const {
  return rows_.householderQr().solve(nominal_);
}

std::pair<double, double> LsqProblem::lambda_bounds() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rows_.transpose() * rows_);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

GainCertificate certify_gains(double kappa1, double kappa2, const GraphSpectrum& spec,
                              const LsqProblem& problem) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0))
    throw ValidationError("certify_gains: gains must be positive");
  const auto [lam_h, lam_hh] = problem.lambda_bounds();
  GainCertificate cert;
  cert.kappa1 = kappa1;
  cert.kappa2 = kappa2;
  cert.lambda_lower = std::min(spec.algebraic_connectivity, lam_h);
  cert.lambda_upper = std::max(spec.max_eig, lam_hh);
  const double n = static_cast<double>(problem.node_count());
  const double lo4 = std::pow(cert.lambda_lower, 4);
  cert.kappa2_bound = 6.0 * n * std::pow(cert.lambda_upper, 4) * kappa1 * kappa1 / lo4 *
                      std::max(1.0, 1.0 / cert.lambda_lower);
  cert.satisfied = kappa1 >= 1.0 && kappa2 >= cert.kappa2_bound;
  return cert;
}

}  // namespace dlsq
