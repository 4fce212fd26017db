#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dlsq/disturbance.hpp"
#include "dlsq/numerics.hpp"
#include "test_util.hpp"

using namespace dlsq;
using namespace dlsq_test;

namespace {

OdeSystem linear_ode(const Eigen::MatrixXd& a) {
  OdeSystem sys;
  sys.state_dim = static_cast<int>(a.rows());
  sys.rhs = [a](double, std::span<const double> y, std::span<double> dy) {
    Eigen::Map<Eigen::VectorXd>(dy.data(), dy.size()) =
        a * Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  };
  return sys;
}

// companion matrix of a monic polynomial with the given roots; observable
// with a random row almost surely
Eigen::MatrixXd companion_from_roots(const std::vector<double>& real_roots,
                                     const std::vector<std::pair<double, double>>& complex_pairs) {
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(1);
  coeffs(0) = 1.0;  // polynomial "1"
  const auto mult = [&](const std::vector<double>& poly) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(coeffs.size() + poly.size() - 1);
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
      for (std::size_t j = 0; j < poly.size(); ++j) next(i + j) += coeffs(i) * poly[j];
    coeffs = next;
  };
  for (double r : real_roots) mult({-r, 1.0});  // (s - r)
  for (auto [re, im] : complex_pairs) mult({re * re + im * im, -2.0 * re, 1.0});
  const Eigen::Index n = coeffs.size() - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  comp.block(1, 0, n - 1, n - 1).diagonal().setOnes();
  comp.col(n - 1) = -coeffs.head(n);
  return comp;
}

}  // namespace

TEST_CASE("integrate: constant and scalar decay") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd y0(2);
  y0 << 3.0, -4.0;
  CHECK((integrate(linear_ode(zero), 0.0, 5.0, 1e-3, y0) - y0).norm() == 0.0);

  const Eigen::MatrixXd minus = -Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd one(1);
  one << 1.0;
  const Eigen::VectorXd fin = integrate(linear_ode(minus), 0.0, 1.0, 1e-3, one);
  CHECK(std::abs(fin(0) - std::exp(-1.0)) < 1e-10);
}

TEST_CASE("integrate: exosystem matches the closed form over 100 s") {
  const auto exo = build_exosystem({{1.0, 0.5, 0.3}}, 2.0);
  const Eigen::VectorXd fin = integrate(linear_ode(exo.S), 0.0, 100.0, 1e-3, exo.eta0);
  const double expect = 2.0 + 1.0 * std::sin(0.5 * 100.0 + 0.3);
  CHECK(std::abs(exo.D * fin - expect) < 1e-8);
}

TEST_CASE("integrate: fourth-order convergence on the exosystem") {
  const auto exo = build_exosystem({{1.0, 1.3, 0.1}}, 0.0);
  const double t_end = 10.0;
  const double expect = std::sin(1.3 * t_end + 0.1);
  std::vector<double> dts{4e-3, 2e-3, 1e-3, 5e-4};
  std::vector<double> errs;
  for (double dt : dts) {
    const Eigen::VectorXd fin = integrate(linear_ode(exo.S), 0.0, t_end, dt, exo.eta0);
    errs.push_back(std::abs(exo.D * fin - expect));
  }
  // log-log slope across successive halvings
  double slope_sum = 0.0;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i)
    slope_sum += std::log2(errs[i] / errs[i + 1]);
  const double slope = slope_sum / static_cast<double>(errs.size() - 1);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.075));  // 4 +- 0.3
}

TEST_CASE("integrate: recording grid and shortened final step") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  std::vector<double> times;
  TraceSink sink = [&](std::size_t, double t, std::span<const double>) { times.push_back(t); };

  integrate(linear_ode(zero), 0.0, 0.3, 1e-3, y0, sink, 10);
  CHECK(times.size() == 31);  // 300 steps / 10 + initial sample
  CHECK(times.front() == 0.0);
  CHECK(times.back() == doctest::Approx(0.3).epsilon(1e-12));

  times.clear();
  integrate(linear_ode(zero), 0.0, 0.0105, 1e-3, y0, sink, 5);  // non-divisible horizon
  CHECK(times.size() == 4);  // steps 0, 5, 10 plus shortened final step 11
  CHECK(times.back() == doctest::Approx(0.0105).epsilon(1e-12));
}

TEST_CASE("integrate: aborts on non-finite states with the time stamp") {
  OdeSystem sys;
  sys.state_dim = 1;
  sys.rhs = [](double t, std::span<const double> y, std::span<double> dy) {
    dy[0] = t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : -y[0];
  };
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  try {
    integrate(sys, 0.0, 1.0, 1e-2, y0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.time > 0.5);
    CHECK(e.time <= 1.0);
  }
  CHECK_THROWS_AS(integrate(sys, 0.0, 1.0, -1e-3, y0), ValidationError);
  CHECK_THROWS_AS(integrate(sys, 1.0, 0.5, 1e-3, y0), ValidationError);
}

TEST_CASE("sylvester: scalar case") {
  const auto sol = solve_sylvester(Eigen::MatrixXd::Zero(1, 1), -Eigen::MatrixXd::Identity(1, 1),
                                   Eigen::VectorXd::Ones(1), Eigen::RowVectorXd::Ones(1));
  REQUIRE(sol.ok);
  CHECK(sol.T(0, 0) == doctest::Approx(1.0));  // T*0 - (-1)*T = 1
}

TEST_CASE("sylvester: luenberger specialization gives T = I") {
  const auto exo = build_exosystem({{1.0, 0.5, 0.0}}, 10.0);
  Eigen::VectorXd gain(3);
  gain << 24.0, -18.0, 21.5;
  const Eigen::MatrixXd s_tilde = exo.S - gain * exo.D;
  const auto sol = solve_sylvester(exo.S, s_tilde, gain, exo.D);
  REQUIRE(sol.ok);
  CHECK((sol.T - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-9);
}

TEST_CASE("sylvester: random stable/skew pairs satisfy the residual bound") {
  Rng rng(55);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform01() * 2.999);
    std::vector<double> freqs;
    double nxt = 0.0;
    for (int j = 0; j < k; ++j) {
      nxt += 0.2 + rng.uniform01();
      freqs.push_back(nxt);
    }
    const Eigen::MatrixXd sc = exosystem_matrix(freqs);
    const int n = 2 * k + 1;
    // random Hurwitz matrix: A - (max Re eig + margin) I
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    double max_re = -1e9;
    for (const auto& l : eigenvalues(a)) max_re = std::max(max_re, l.real());
    a -= (max_re + 0.5) * Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd b = random_vector(n, rng);
    const Eigen::RowVectorXd d = exosystem_output_row(k);

    const auto sol = solve_sylvester(sc, a, b, d);
    REQUIRE(sol.ok);
    const double scale = (sc.norm() + a.norm()) * std::max(sol.T.norm(), 1.0);
    CHECK(sol.residual_norm <= 1e-10 * std::max(scale, 1.0));
  }
}

TEST_CASE("sylvester: structured failures") {
  // common eigenvalue (both singular at 0)
  const auto degenerate =
      solve_sylvester(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1),
                      Eigen::VectorXd::Ones(1), Eigen::RowVectorXd::Ones(1));
  CHECK_FALSE(degenerate.ok);
  CHECK(!degenerate.reason.empty());

  // duplicate frequencies make (D, Sc) unobservable and T singular
  const Eigen::MatrixXd sc = exosystem_matrix({0.8, 0.8});
  Eigen::VectorXd c5(5);
  c5 << 32.0, 80.0, 80.0, 40.0, 10.0;  // (s+2)^5
  Eigen::MatrixXd st = Eigen::MatrixXd::Zero(5, 5);
  st.topRightCorner(4, 4).diagonal().setOnes();
  st.row(4) = -c5.transpose();
  const auto dup = solve_sylvester(sc, st, Eigen::VectorXd::Unit(5, 4), exosystem_output_row(2));
  CHECK_FALSE(dup.ok);
}

TEST_CASE("observability matrix") {
  CHECK(observability_matrix(Eigen::RowVectorXd::Ones(1), Eigen::MatrixXd::Zero(1, 1))(0, 0) ==
        1.0);
  const auto exo = build_exosystem({{1.0, 0.5, 0.0}}, 10.0);
  const Eigen::MatrixXd phi = observability_matrix(exo.D, exo.S);
  CHECK(phi.rows() == 3);
  CHECK(std::abs(phi.determinant()) > 1e-6);
}

TEST_CASE("parallel observability: worked examples") {
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd a2(2, 2);
  a2 << 0, 1, -1, 0;
  Eigen::RowVectorXd p1 = Eigen::RowVectorXd::Ones(1);
  Eigen::RowVectorXd p2(2);
  p2 << 1, 0;
  CHECK(parallel_observability_check(p1, a1, p2, a2));  // {0} vs {+-i}

  CHECK_FALSE(parallel_observability_check(p1, a1, p1, a1));  // shared eigenvalue 0

  Eigen::MatrixXd w1(2, 2), w2(2, 2);
  const double w = 0.9;
  w1 << 0, w, -w, 0;
  w2 << 0, 2 * w, -2 * w, 0;
  CHECK(parallel_observability_check(p2, w1, p2, w2));

  Eigen::RowVectorXd blind(2);
  blind << 0, 0;
  CHECK_THROWS_AS(parallel_observability_check(blind, w1, p2, w2), ValidationError);
}

TEST_CASE("parallel observability equals the brute-force rank verdict (200 instances)") {
  Rng rng(101);
  // roots drawn from a small lattice so collisions are common but never
  // borderline-close
  const std::vector<double> lattice{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  int disagreements = 0;
  int checked = 0;
  while (checked < 200) {
    const auto draw_system = [&](int max_n) {
      const int n_real = 1 + static_cast<int>(rng.uniform01() * (max_n - 0.001));
      std::vector<double> roots;
      for (int i = 0; i < n_real; ++i)
        roots.push_back(lattice[static_cast<std::size_t>(rng.uniform01() * lattice.size())]);
      std::sort(roots.begin(), roots.end());
      roots.erase(std::unique(roots.begin(), roots.end()), roots.end());  // keep observable
      return companion_from_roots(roots, {});
    };
    const Eigen::MatrixXd a1 = draw_system(4);
    const Eigen::MatrixXd a2 = draw_system(4);
    Eigen::RowVectorXd p1 = random_vector(static_cast<int>(a1.rows()), rng).transpose();
    Eigen::RowVectorXd p2 = random_vector(static_cast<int>(a2.rows()), rng).transpose();
    if (numerical_rank(observability_matrix(p1, a1)) != a1.rows()) continue;
    if (numerical_rank(observability_matrix(p2, a2)) != a2.rows()) continue;
    ++checked;

    const bool verdict = parallel_observability_check(p1, a1, p2, a2);

    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(a1.rows() + a2.rows(), a1.cols() + a2.cols());
    block.topLeftCorner(a1.rows(), a1.cols()) = a1;
    block.bottomRightCorner(a2.rows(), a2.cols()) = a2;
    Eigen::RowVectorXd stacked(a1.cols() + a2.cols());
    stacked << p1, p2;
    const bool brute =
        numerical_rank(observability_matrix(stacked, block), 1e-7) == block.rows();
    if (verdict != brute) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("poly roots and hurwitz report") {
  Eigen::VectorXd coeffs(3);  // s^3 + 6 s^2 + 12 s + 8 = (s+2)^3
  coeffs << 8.0, 12.0, 6.0;
  for (const auto& r : poly_roots_monic(coeffs))
    CHECK(std::abs(r - std::complex<double>(-2.0, 0.0)) < 1e-4);

  Eigen::MatrixXd stable(2, 2);
  stable << -1, 0, 0, -3;
  CHECK(check_hurwitz(stable).hurwitz);
  Eigen::MatrixXd marginal = Eigen::MatrixXd::Zero(2, 2);
  const auto rep = check_hurwitz(marginal);
  CHECK_FALSE(rep.hurwitz);
  CHECK(rep.offending.size() == 2);
}
