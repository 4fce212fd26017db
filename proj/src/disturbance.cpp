#include "dlsq/disturbance.hpp"

#include <algorithm>
#include <cmath>

#include "dlsq/numerics.hpp"

namespace dlsq {

DisturbanceSpec::DisturbanceSpec(std::vector<std::vector<Sinusoid>> per_node)
    : per_node_(std::move(per_node)) {
  for (std::size_t i = 0; i < per_node_.size(); ++i) {
    const auto& sins = per_node_[i];
    for (std::size_t j = 0; j < sins.size(); ++j) {
      if (!(sins[j].frequency > 0.0))
        throw ValidationError("disturbance: node " + std::to_string(i + 1) + " sinusoid " +
                              std::to_string(j + 1) + " frequency must be strictly positive");
      for (std::size_t l = 0; l < j; ++l)
        if (sins[l].frequency == sins[j].frequency)
          throw ValidationError("disturbance: node " + std::to_string(i + 1) +
                                " has duplicate frequency " + std::to_string(sins[j].frequency));
    }
  }
}

double eval_disturbance(const DisturbanceSpec& spec, int node, double t) {
  double out = 0.0;
  for (const auto& s : spec.node(node))
    out += s.amplitude * std::sin(s.frequency * t + s.phase);
  return out;
}

Exosystem build_exosystem(const std::vector<Sinusoid>& sinusoids, double nominal) {
  // reuse the spec validation for this one node
  DisturbanceSpec check({sinusoids});
  const int k = static_cast<int>(sinusoids.size());
  const int n = 2 * k + 1;
  Exosystem exo;
  std::vector<double> freqs(k);
  for (int j = 0; j < k; ++j) freqs[j] = sinusoids[j].frequency;
  exo.S = exosystem_matrix(freqs);
  exo.D = exosystem_output_row(k);
  exo.eta0 = Eigen::VectorXd::Zero(n);
  exo.eta0(0) = nominal;
  for (int j = 0; j < k; ++j) {
    // a(t) = a0 cos wt + b0 sin wt matched to A sin(wt + phi)
    exo.eta0(1 + 2 * j) = sinusoids[j].amplitude * std::sin(sinusoids[j].phase);
    exo.eta0(2 + 2 * j) = sinusoids[j].amplitude * std::cos(sinusoids[j].phase);
  }
  return exo;
}

Eigen::MatrixXd exosystem_matrix(const std::vector<double>& frequencies) {
  const int k = static_cast<int>(frequencies.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * k + 1, 2 * k + 1);
  for (int j = 0; j < k; ++j) {
    s(1 + 2 * j, 2 + 2 * j) = frequencies[j];
    s(2 + 2 * j, 1 + 2 * j) = -frequencies[j];
  }
  return s;
}

Eigen::RowVectorXd exosystem_output_row(int k) {
  Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(2 * k + 1);
  d(0) = 1.0;
  for (int j = 0; j < k; ++j) d(1 + 2 * j) = 1.0;
  return d;
}

PolyCoeffs poly_from_freqs(const std::vector<double>& frequencies) {
  const int k = static_cast<int>(frequencies.size());
  // expand prod_j (lambda + w_j^2) in lambda = s^2, low -> high degree
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 1);
  c(0) = 1.0;
  for (int j = 0; j < k; ++j) {
    const double w2 = frequencies[j] * frequencies[j];
    for (int d = j + 1; d >= 1; --d) c(d) = c(d - 1) + w2 * c(d);
    c(0) *= w2;
  }
  PolyCoeffs out;
  out.alpha = c.head(k);  // alpha_j = coefficient of lambda^(j-1)
  return out;
}

FreqRecovery freqs_from_poly(const PolyCoeffs& coeffs) {
  FreqRecovery rec;
  const int k = coeffs.order();
  if (k == 0) {
    rec.ok = true;
    return rec;
  }
  std::vector<std::complex<double>> roots;
  if (k == 1) {
    roots = {std::complex<double>(-coeffs.alpha(0), 0.0)};
  } else {
    roots = poly_roots_monic(coeffs.alpha);
  }
  for (const auto& l : roots) {
    if (std::abs(l.imag()) > 1e-6 * (1.0 + std::abs(l))) {
      rec.reason = "complex root of the frequency polynomial";
      return rec;
    }
    if (!(l.real() < -1e-9)) {
      rec.reason = "nonnegative root of the frequency polynomial";
      return rec;
    }
    rec.omega.push_back(std::sqrt(-l.real()));
  }
  std::sort(rec.omega.begin(), rec.omega.end());
  rec.ok = true;
  return rec;
}

CompanionForm companion_form(const PolyCoeffs& coeffs) {
  const int k = coeffs.order();
  const int n = 2 * k + 1;
  CompanionForm out;
  out.S0 = Eigen::MatrixXd::Zero(n, n);
  out.S0.topRightCorner(n - 1, n - 1).diagonal().setOnes();
  for (int j = 0; j < k; ++j) out.S0(n - 1, 1 + 2 * j) = -coeffs.alpha(j);
  out.D0 = Eigen::RowVectorXd::Zero(n);
  out.D0(0) = 1.0;
  return out;
}

Eigen::RowVectorXd compensation_row(int k) {
  Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(2 * k + 1);
  for (int j = 0; j < k; ++j) d(1 + 2 * j) = 1.0;
  return d;
}

}  // namespace dlsq
