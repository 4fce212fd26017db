#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dlsq/identifier.hpp"
#include "dlsq/numerics.hpp"
#include "test_util.hpp"

using namespace dlsq;
using namespace dlsq_test;

namespace {

Eigen::Vector3d fixture_coeffs() { return {8.0, 12.0, 6.0}; }

// filter + identifier driven by z~(t) = z + A sin(w t), stacked [eta (2k+1), alpha (k)]
OdeSystem ident_ode(const FilterBank& f, const IdentifierParams& params, double z, double amp,
                    double omega) {
  OdeSystem sys;
  sys.state_dim = f.dim() + f.k();
  sys.rhs = [&f, params, z, amp, omega](double t, std::span<const double> y,
                                        std::span<double> dy) {
    const Eigen::Map<const Eigen::VectorXd> eta(y.data(), f.dim());
    const Eigen::Map<const Eigen::VectorXd> alpha(y.data() + f.dim(), f.k());
    const double zt = z + amp * std::sin(omega * t);
    Eigen::Map<Eigen::VectorXd> deta(dy.data(), f.dim());
    deta = filter_step_rhs(f, eta, zt);
    const double e = identifier_error(identifier_output(f, alpha, eta), zt);
    Eigen::Map<Eigen::VectorXd> dalpha(dy.data() + f.dim(), f.k());
    dalpha = gradient_update_rhs(params, e, eta, f);
  };
  return sys;
}

}  // namespace

TEST_CASE("filter construction accepts the (8,12,6) design") {
  const FilterBank f(1, fixture_coeffs());
  CHECK(f.dim() == 3);
  CHECK(f.S()(2, 0) == -8.0);
  CHECK(f.S()(2, 1) == -12.0);
  CHECK(f.S()(2, 2) == -6.0);
  CHECK(f.S()(0, 1) == 1.0);
  CHECK(f.B()(2) == 1.0);

  // char poly (s+2)^3: triple eigenvalue at -2
  for (const auto& l : eigenvalues(f.S())) {
    CHECK(l.real() == doctest::Approx(-2.0).epsilon(1e-4));
    CHECK(std::abs(l.imag()) < 1e-4);
  }
}

TEST_CASE("filter construction rejects non-Hurwitz designs") {
  Eigen::Vector3d bad(1.0, -1.0, 1.0);  // s^3 + s^2 - s + 1 has a RHP root
  CHECK_THROWS_WITH_AS(FilterBank(1, bad), doctest::Contains("Hurwitz"), ValidationError);
  CHECK_THROWS_AS(FilterBank(1, Eigen::VectorXd::Zero(4)), ValidationError);
  CHECK_THROWS_AS(FilterBank(0, Eigen::VectorXd::Ones(1)), ValidationError);
}

TEST_CASE("binomial designs (s+a)^(2k+1) are accepted") {
  // (s+1)^3 = s^3 + 3 s^2 + 3 s + 1 -> (b0, a1, b1) = (1, 3, 3)
  CHECK_NOTHROW(FilterBank(1, Eigen::Vector3d(1.0, 3.0, 3.0)));
  // (s+2)^5 = s^5 + 10 s^4 + 40 s^3 + 80 s^2 + 80 s + 32
  Eigen::VectorXd c5(5);
  c5 << 32.0, 80.0, 80.0, 40.0, 10.0;
  CHECK_NOTHROW(FilterBank(2, c5));
}

TEST_CASE("filter rhs basics") {
  const FilterBank f(1, fixture_coeffs());
  CHECK((filter_step_rhs(f, Eigen::Vector3d::Zero(), 1.0) - f.B()).norm() == 0.0);

  // unforced decay
  OdeSystem sys;
  sys.state_dim = 3;
  sys.rhs = [&f](double, std::span<const double> y, std::span<double> dy) {
    const Eigen::Map<const Eigen::Vector3d> eta(y.data());
    Eigen::Map<Eigen::Vector3d> d(dy.data());
    d = filter_step_rhs(f, eta, 0.0);
  };
  const Eigen::VectorXd fin = integrate(sys, 0.0, 15.0, 1e-3, Eigen::Vector3d(1.0, -2.0, 0.5));
  CHECK(fin.norm() < 1e-8);

  // constant input: steady state -S^-1 B c = (c/b0, 0, 0)
  const double c = 5.0;
  const Eigen::Vector3d steady = -f.S().partialPivLu().solve(f.B() * c);
  CHECK(steady(0) == doctest::Approx(c / 8.0));
  CHECK(std::abs(steady(1)) < 1e-12);
  CHECK(std::abs(steady(2)) < 1e-12);
  OdeSystem forced;
  forced.state_dim = 3;
  forced.rhs = [&f, c](double, std::span<const double> y, std::span<double> dy) {
    const Eigen::Map<const Eigen::Vector3d> eta(y.data());
    Eigen::Map<Eigen::Vector3d> d(dy.data());
    d = filter_step_rhs(f, eta, c);
  };
  const Eigen::VectorXd driven = integrate(forced, 0.0, 20.0, 1e-3, Eigen::Vector3d::Zero());
  CHECK((driven - steady).norm() < 1e-8);
}

TEST_CASE("identifier output row") {
  const FilterBank f(1, fixture_coeffs());
  CHECK(identifier_output(f, Eigen::VectorXd::Zero(1), Eigen::Vector3d::Zero()) == 0.0);

  // alpha_hat = 0 reduces to the raw design row
  const Eigen::Vector3d eta(0.5, -1.0, 2.0);
  CHECK(identifier_output(f, Eigen::VectorXd::Zero(1), eta) ==
        doctest::Approx(8.0 * 0.5 + 12.0 * -1.0 + 6.0 * 2.0));

  Eigen::VectorXd a(1);
  a << 0.25;
  CHECK(identifier_output(f, a, eta) ==
        doctest::Approx(8.0 * 0.5 + (12.0 - 0.25) * -1.0 + 6.0 * 2.0));
}

TEST_CASE("identifier error is a literal subtraction") {
  CHECK(identifier_error(1.0, 1.0) == 0.0);
  CHECK(identifier_error(1.0, 0.0) == 1.0);
}

TEST_CASE("gradient update rule") {
  const FilterBank f(1, fixture_coeffs());
  Eigen::Vector3d eta(0.0, 2.0, 0.0);  // regressor = eta_2 = 2

  IdentifierParams plain{30.0, 0.0};
  CHECK(gradient_update_rhs(plain, 0.0, eta, f).norm() == 0.0);
  CHECK(gradient_update_rhs(plain, 1.0, eta, f)(0) == doctest::Approx(60.0));

  IdentifierParams normalized{30.0, 1.0};
  CHECK(gradient_update_rhs(normalized, 1.0, eta, f)(0) == doctest::Approx(12.0));

  CHECK_THROWS_AS(gradient_update_rhs(IdentifierParams{0.0, 0.0}, 1.0, eta, f), ValidationError);
  CHECK_THROWS_AS(gradient_update_rhs(IdentifierParams{1.0, -1.0}, 1.0, eta, f), ValidationError);
}

TEST_CASE("filtered output identity: exponential decay of z~ - z^ at the true alpha") {
  const FilterBank f(1, fixture_coeffs());
  const double z = 10.0, omega = 0.5;
  Eigen::VectorXd alpha_true(1);
  alpha_true << omega * omega;

  OdeSystem sys;
  sys.state_dim = 3;
  sys.rhs = [&f, z, omega](double t, std::span<const double> y, std::span<double> dy) {
    const Eigen::Map<const Eigen::Vector3d> eta(y.data());
    Eigen::Map<Eigen::Vector3d> d(dy.data());
    d = filter_step_rhs(f, eta, z + std::sin(omega * t));
  };

  std::vector<double> ts, logs;
  TraceSink sink = [&](std::size_t, double t, std::span<const double> y) {
    if (t < 6.0 || t > 12.0) return;
    const Eigen::Map<const Eigen::Vector3d> eta(y.data());
    const double zt = z + std::sin(omega * t);
    const double zhat = identifier_output(f, alpha_true, eta);
    ts.push_back(t);
    logs.push_back(std::log(std::max(std::abs(zhat - zt), 1e-300)));
  };
  const Eigen::VectorXd fin = integrate(sys, 0.0, 14.0, 1e-3, Eigen::Vector3d::Zero(), sink, 10);

  // once the transient has decayed the identifier error at the true
  // coefficients is far below 1e-4
  const Eigen::Map<const Eigen::Vector3d> eta_fin(fin.data());
  CHECK(std::abs(identifier_error(identifier_output(f, alpha_true, eta_fin),
                                  z + std::sin(omega * 14.0))) < 1e-4);

  REQUIRE(ts.size() > 100);
  const double n = static_cast<double>(ts.size());
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += logs[i];
  }
  mt /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (logs[i] - my);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  const double slope = num / den;
  // slowest filter mode has Re = -2; allow margin for the polynomial factor
  // of the defective triple eigenvalue
  CHECK(slope <= -2.0 + 0.35);
}

TEST_CASE("parameter convergence of the normalized identifier at 100 s") {
  const FilterBank f(1, fixture_coeffs());
  const IdentifierParams params{30.0, 1.0};
  Eigen::VectorXd y0(4);
  y0 << 0.5, -0.3, 0.2, 0.0;  // eta(0), alpha_hat(0) = 0

  double max_alpha = 0.0;
  TraceSink sink = [&](std::size_t, double, std::span<const double> y) {
    max_alpha = std::max(max_alpha, std::abs(y[3]));
  };
  const Eigen::VectorXd fin =
      integrate(ident_ode(f, params, 10.0, 1.0, 0.5), 0.0, 100.0, 1e-3, y0, sink, 100);
  CHECK(std::abs(fin(3) - 0.25) < 1e-2);
  CHECK(max_alpha < 50.0);  // bounded along the trajectory

  // identifier error itself settles near zero
  const Eigen::Map<const Eigen::Vector3d> eta(fin.data());
  Eigen::VectorXd a(1);
  a << fin(3);
  const double zt = 10.0 + std::sin(0.5 * 100.0);
  CHECK(std::abs(identifier_output(f, a, eta) - zt) < 1e-2);
}
