#include "dlsq/identifier.hpp"

#include <string>

#include "dlsq/numerics.hpp"

namespace dlsq {

FilterBank::FilterBank(int k, const Eigen::VectorXd& coeffs) : k_(k), coeffs_(coeffs) {
  if (k_ < 1) throw ValidationError("filter: k must be at least 1");
  const int n = 2 * k_ + 1;
  if (coeffs_.size() != n)
    throw ValidationError("filter: expected " + std::to_string(n) + " design coefficients, got " +
                          std::to_string(coeffs_.size()));
  s_ = Eigen::MatrixXd::Zero(n, n);
  s_.topRightCorner(n - 1, n - 1).diagonal().setOnes();
  s_.row(n - 1) = -coeffs_.transpose();
  b_ = Eigen::VectorXd::Unit(n, n - 1);

  const auto rep = check_hurwitz(s_);
  if (!rep.hurwitz) {
    std::string msg = "filter: design is not Hurwitz; offending eigenvalues:";
    for (const auto& l : rep.offending)
      msg += " (" + std::to_string(l.real()) + (l.imag() >= 0 ? "+" : "") +
             std::to_string(l.imag()) + "i)";
    throw ValidationError(msg);
  }
  // companion form with B = e_n is controllable by construction; cheap cross
  // check on the controllability matrix anyway
  Eigen::MatrixXd ctrl(n, n);
  Eigen::VectorXd col = b_;
  for (int i = 0; i < n; ++i) {
    ctrl.col(i) = col;
    col = s_ * col;
  }
  if (numerical_rank(ctrl) != n)
    throw ValidationError("filter: companion pair unexpectedly uncontrollable");
}

Eigen::VectorXd filter_step_rhs(const FilterBank& f, const Eigen::VectorXd& eta, double z_tilde) {
  return f.S() * eta + f.B() * z_tilde;
}

double identifier_output(const FilterBank& f, const Eigen::VectorXd& alpha_hat,
                         const Eigen::VectorXd& eta) {
  const int k = f.k();
  if (alpha_hat.size() != k) throw ValidationError("identifier_output: alpha_hat size mismatch");
  if (eta.size() != f.dim()) throw ValidationError("identifier_output: state size mismatch");
  Eigen::RowVectorXd row = f.design().transpose();
  for (int j = 0; j < k; ++j) row(1 + 2 * j) -= alpha_hat(j);
  return row * eta;
}

Eigen::VectorXd identifier_regressor(const FilterBank& f, const Eigen::VectorXd& eta) {
  const int k = f.k();
  Eigen::VectorXd reg(k);
  for (int j = 0; j < k; ++j) reg(j) = eta(1 + 2 * j);
  return reg;
}

Eigen::VectorXd gradient_update_rhs(const IdentifierParams& params, double error,
                                    const Eigen::VectorXd& eta, const FilterBank& f) {
  if (!(params.learning_rate > 0.0))
    throw ValidationError("identifier: learning rate must be positive");
  if (params.normalization_weight < 0.0)
    throw ValidationError("identifier: normalization weight must be nonnegative");
  Eigen::VectorXd reg = identifier_regressor(f, eta);
  double gain = params.learning_rate * error;
  if (params.normalization_weight > 0.0)
    gain /= 1.0 + params.normalization_weight * reg.squaredNorm();
  return gain * reg;
}

}  // namespace dlsq
