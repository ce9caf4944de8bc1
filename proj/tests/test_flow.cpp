#include <doctest.h>

#include <cmath>

#include "polarsturm/flow.hpp"
#include "support/oracles.hpp"

using namespace polarsturm;

namespace {

CoefficientModel harmonic() {
  return CoefficientModel::constant(Mat::Identity(1, 1), Mat::Zero(1, 1),
                                    Mat::Identity(1, 1));
}

double harmonic_block_error(const FlowSolution& flow, double tau) {
  SymplecticFrame f = SymplecticFrame::from_matrix(flow.at(tau));
  const double c = std::cos(tau), s = std::sin(tau);
  double err = 0;
  err = std::max(err, std::abs(f.q2(0, 0) - c));
  err = std::max(err, std::abs(f.q1(0, 0) - s));
  err = std::max(err, std::abs(f.p2(0, 0) + s));
  err = std::max(err, std::abs(f.p1(0, 0) - c));
  return err;
}

}  // namespace

TEST_CASE("harmonic oscillator reproduces cosine and sine") {
  FlowSolution flow = integrate_fundamental(harmonic(), 0.0, 2 * kPi, 1e-3);
  double worst = 0;
  for (double tau : flow.grid())
    worst = std::max(worst, harmonic_block_error(flow, tau));
  CHECK(worst <= 1e-8);
  CHECK(flow.max_residual() <= 1e-9);
}

TEST_CASE("fourth order convergence where truncation dominates") {
  const double coarse_err = [] {
    FlowSolution f = integrate_fundamental(harmonic(), 0.0, 2 * kPi, 0.02);
    return harmonic_block_error(f, 2 * kPi);
  }();
  const double fine_err = [] {
    FlowSolution f = integrate_fundamental(harmonic(), 0.0, 2 * kPi, 0.01);
    return harmonic_block_error(f, 2 * kPi);
  }();
  const double ratio = coarse_err / fine_err;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("constant coefficients match the matrix exponential") {
  Rng r(71);
  const int n = 2;
  CoefficientModel model = CoefficientModel::constant(
      r.symmetric(n, 0.6), r.matrix(n, n, 0.5), r.symmetric_in(n, 0.4, 1.5));
  FlowSolution flow = integrate_fundamental(model, 0.0, 1.5, 1e-3);
  const Mat m = model.m(0.0, 0.0);
  for (double tau : {0.3, 0.77712, 1.5}) {
    Mat want = matrix_exp(tau * m);
    CHECK((flow.at(tau) - want).norm() <= 1e-9 * want.norm());
  }
  // Dense output between nodes and the derivative identity.
  const double off = 0.5 * (flow.grid()[3] + flow.grid()[4]);
  CHECK((flow.at(off) - matrix_exp(off * m)).norm() <= 1e-9);
  CHECK((flow.derivative(off) - m * flow.at(off)).norm() <= 1e-7);
  // Propagator consistency: Phi(b) = U(a, b) Phi(a).
  Mat u = flow.propagator(0.4, 1.1);
  CHECK((u * flow.at(0.4) - flow.at(1.1)).norm() <= 1e-9);
}

TEST_CASE("parameter dependence is affine in the coefficients") {
  Rng r(73);
  const int n = 2;
  CoefficientModel model;
  model.n = n;
  model.a_base = CoeffFn::constant(r.symmetric(n, 0.5));
  model.a_lin = CoeffFn::constant(r.symmetric(n, 0.4));
  model.b_base = CoeffFn::constant(r.matrix(n, n, 0.3));
  model.b_lin = CoeffFn::zero(n);
  model.c_base = CoeffFn::constant(r.symmetric_in(n, 0.5, 1.2));
  model.c_lin = CoeffFn::constant(r.symmetric(n, 0.2));
  const double lambda = 0.7;
  CoefficientModel frozen = CoefficientModel::constant(
      model.a(0, lambda), model.b(0, lambda), model.c(0, lambda));
  FlowSolution a = integrate_fundamental(model, lambda, 1.0, 1e-3);
  FlowSolution b = integrate_fundamental(frozen, 0.0, 1.0, 1e-3);
  CHECK((a.at(1.0) - b.at(1.0)).norm() <= 1e-12);
}

TEST_CASE("time dependent coefficients against a scalar oracle") {
  // q'' = -(2 + sin-ish polynomial) q via the tabulated/polynomial paths.
  std::vector<Mat> coeffs = {Mat::Identity(1, 1) * 2.0,
                             Mat::Identity(1, 1) * 0.5,
                             Mat::Identity(1, 1) * -0.25};
  CoefficientModel model;
  model.n = 1;
  model.a_base = CoeffFn::polynomial(coeffs);
  model.b_base = CoeffFn::zero(1);
  model.c_base = CoeffFn::constant(Mat::Identity(1, 1));
  model.a_lin = CoeffFn::zero(1);
  model.b_lin = CoeffFn::zero(1);
  model.c_lin = CoeffFn::zero(1);
  auto a_fn = [](double tau) { return 2.0 + 0.5 * tau - 0.25 * tau * tau; };
  FlowSolution flow = integrate_fundamental(model, 0.0, 2.0, 1e-3);
  SymplecticFrame f = SymplecticFrame::from_matrix(flow.at(2.0));
  auto qs = oracle::scalar_shoot(a_fn, 0.0, 1.0, 2.0, 4000);
  CHECK(f.q1(0, 0) == doctest::Approx(qs.first).epsilon(1e-9));
  CHECK(f.p1(0, 0) == doctest::Approx(qs.second).epsilon(1e-9));
}

TEST_CASE("hyperbolic growth stays finite and symplectic") {
  CoefficientModel model = CoefficientModel::constant(
      -25.0 * Mat::Identity(1, 1), Mat::Zero(1, 1), Mat::Identity(1, 1));
  FlowSolution flow = integrate_fundamental(model, 0.0, 6.0, 1e-3);
  // cosh(5 * 6) ~ 5e12: large but representable; the relative residual
  // must stay small even though the raw entries explode.
  CHECK(std::isfinite(flow.at(6.0).norm()));
  CHECK(flow.max_residual() <= 1e-9);
}

TEST_CASE("invalid setups are refused") {
  CHECK_THROWS_AS(integrate_fundamental(harmonic(), 0.0, -1.0, 1e-3),
                  ConfigError);
  CHECK_THROWS_AS(integrate_fundamental(harmonic(), 0.0, 1.0, 0.0),
                  ConfigError);
  Mat asym(2, 2);
  asym << 1, 2, 0, 1;
  CoefficientModel bad = CoefficientModel::constant(
      asym, Mat::Zero(2, 2), Mat::Identity(2, 2));
  CHECK_THROWS_AS(integrate_fundamental(bad, 0.0, 1.0, 1e-2), ConfigError);
}
