#include "dlsq/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dlsq/kernels.hpp"

namespace dlsq {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

Eigen::VectorXd integrate(const OdeSystem& sys, double t0, double t1, double dt,
                          const Eigen::VectorXd& y0, const TraceSink& sink,
                          std::size_t decimation) {
  if (!(dt > 0.0)) throw ValidationError("integrate: dt must be positive");
  if (!(t1 > t0)) throw ValidationError("integrate: t1 must exceed t0");
  if (y0.size() != sys.state_dim) throw ValidationError("integrate: state dimension mismatch");
  if (decimation == 0) decimation = 1;

  const std::size_t n = static_cast<std::size_t>(sys.state_dim);
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), stage(n);

  auto rhs = [&](double t, const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    sys.rhs(t, {in.data(), n}, {out.data(), n});
  };

  std::size_t step = 0;
  bool final_recorded = false;
  bool initial_recorded = false;

  double t = t0;
  while (t < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
    double h = dt;
    if (t + h > t1) h = t1 - t;  // shorten the last step
    if (sys.on_step_start) sys.on_step_start(t, {y.data(), n});
    // the initial sample is recorded after the first per-step refresh so the
    // trace row at t0 reflects the quantities in effect over the first step
    if (sink && !initial_recorded) {
      sink(0, t0, {y.data(), n});
      initial_recorded = true;
    }

    rhs(t, y, k1);
    kernels::add_scaled(n, y.data(), 0.5 * h, k1.data(), stage.data());
    rhs(t + 0.5 * h, stage, k2);
    kernels::add_scaled(n, y.data(), 0.5 * h, k2.data(), stage.data());
    rhs(t + 0.5 * h, stage, k3);
    kernels::add_scaled(n, y.data(), h, k3.data(), stage.data());
    rhs(t + h, stage, k4);
    kernels::rk4_combine(n, y.data(), h, k1.data(), k2.data(), k3.data(), k4.data());

    ++step;
    t = (h == dt) ? t0 + static_cast<double>(step) * dt : t1;

    if (!all_finite({y.data(), n}))
      throw NumericalError("integrate: state became non-finite", t);

    if (sink) {
      if (step % decimation == 0) {
        sink(step, t, {y.data(), n});
        if (t >= t1) final_recorded = true;
      }
    }
  }
  if (sink && !final_recorded && step % decimation != 0) sink(step, t1, {y.data(), n});
  return y;
}

SylvesterSolution solve_sylvester(const Eigen::MatrixXd& s_check,
                                  const Eigen::MatrixXd& s_tilde,
                                  const Eigen::VectorXd& b,
                                  const Eigen::RowVectorXd& d) {
  SylvesterSolution out;
  const Eigen::Index n = s_tilde.rows();
  const Eigen::Index p = s_check.rows();
  if (s_tilde.cols() != n || s_check.cols() != p || b.size() != n || d.size() != p) {
    out.reason = "dimension mismatch";
    return out;
  }

  // vec(T*Sc) - vec(St*T) = (Sc^T (x) I - I (x) St) vec(T), column-major vec.
  const Eigen::Index sz = n * p;
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(sz, sz);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i) {
      const double sc_t = s_check(i, j);  // (Sc^T)(j,i)
      if (sc_t != 0.0) big.block(j * n, i * n, n, n).diagonal().array() += sc_t;
    }
  for (Eigen::Index j = 0; j < p; ++j) big.block(j * n, j * n, n, n) -= s_tilde;

  Eigen::MatrixXd rhs_mat = b * d;  // n x p
  Eigen::Map<Eigen::VectorXd> rhs_vec(rhs_mat.data(), sz);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(big);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    out.reason = "vectorized system singular (common eigenvalues of the two matrices)";
    return out;
  }
  Eigen::VectorXd tvec = lu.solve(rhs_vec);
  out.T = Eigen::Map<Eigen::MatrixXd>(tvec.data(), n, p);
  out.residual_norm = (out.T * s_check - s_tilde * out.T - b * d).norm();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.T);
  out.sigma_min = svd.singularValues().minCoeff();
  out.sigma_max = svd.singularValues().maxCoeff();
  if (out.sigma_min <= 1e-12 * std::max(1.0, out.sigma_max)) {
    out.reason = "solution T numerically singular";
    return out;
  }

  const double scale = (s_check.norm() + s_tilde.norm()) * std::max(out.T.norm(), 1.0);
  if (!(out.residual_norm <= 1e-10 * std::max(scale, 1.0))) {
    out.reason = "residual above tolerance";
    return out;
  }
  out.ok = true;
  return out;
}

Eigen::MatrixXd observability_matrix(const Eigen::RowVectorXd& d, const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  if (s.cols() != n || d.size() != n)
    throw ValidationError("observability_matrix: dimension mismatch");
  Eigen::MatrixXd phi(n, n);
  Eigen::RowVectorXd row = d;
  for (Eigen::Index i = 0; i < n; ++i) {
    phi.row(i) = row;
    row = row * s;
  }
  return phi;
}

bool parallel_observability_check(const Eigen::RowVectorXd& psi1, const Eigen::MatrixXd& a1,
                                  const Eigen::RowVectorXd& psi2, const Eigen::MatrixXd& a2) {
  const auto check_pair = [](const Eigen::RowVectorXd& psi, const Eigen::MatrixXd& a,
                             const char* which) {
    if (numerical_rank(observability_matrix(psi, a)) != a.rows())
      throw ValidationError(std::string("parallel_observability_check: pair ") + which +
                            " is not observable");
  };
  check_pair(psi1, a1, "1");
  check_pair(psi2, a2, "2");

  const auto e1 = eigenvalues(a1);
  const auto e2 = eigenvalues(a2);
  double scale = 0.0;
  for (const auto& l : e1) scale = std::max(scale, std::abs(l));
  for (const auto& l : e2) scale = std::max(scale, std::abs(l));
  const double tol = 1e-8 * std::max(scale, 1.0);
  for (const auto& l1 : e1)
    for (const auto& l2 : e2)
      if (std::abs(l1 - l2) <= tol) return false;
  return true;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = es.eigenvalues()(i);
  return out;
}

std::vector<std::complex<double>> poly_roots_monic(const Eigen::VectorXd& coeffs) {
  const Eigen::Index n = coeffs.size();
  if (n == 0) return {};
  if (n == 1) return {std::complex<double>(-coeffs(0), 0.0)};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  comp.block(1, 0, n - 1, n - 1).diagonal().setOnes();
  comp.col(n - 1) = -coeffs;
  return eigenvalues(comp);
}

HurwitzReport check_hurwitz(const Eigen::MatrixXd& m) {
  HurwitzReport rep;
  rep.all = eigenvalues(m);
  for (const auto& l : rep.all)
    if (l.real() >= -1e-12) rep.offending.push_back(l);
  rep.hurwitz = rep.offending.empty();
  return rep;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double thresh = rel_tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return rank;
}

}  // namespace dlsq
