#include <doctest.h>

#include <cmath>

#include "polarsturm/sensitivity.hpp"
#include "polarsturm/sturm_liouville.hpp"
#include "support/oracles.hpp"

using namespace polarsturm;

namespace {

CoefficientModel random_affine_model(int n, Rng& rng) {
  CoefficientModel m;
  m.n = n;
  m.a_base = CoeffFn::constant(rng.symmetric(n, 0.5));
  m.a_lin = CoeffFn::constant(rng.symmetric(n, 0.4));
  m.b_base = CoeffFn::constant(rng.matrix(n, n, 0.3));
  m.b_lin = CoeffFn::constant(rng.matrix(n, n, 0.2));
  m.c_base = CoeffFn::constant(rng.symmetric_in(n, 0.5, 1.4));
  m.c_lin = CoeffFn::constant(rng.symmetric(n, 0.2));
  return m;
}

Mat fd_m2(const CoefficientModel& model, double lambda, double t, double h,
          double tau, double eps) {
  FlowSolution up = integrate_fundamental(model, lambda + eps, t, h);
  FlowSolution dn = integrate_fundamental(model, lambda - eps, t, h);
  FlowSolution mid = integrate_fundamental(model, lambda, t, h);
  Mat dphi = (up.at(tau) - dn.at(tau)) / (2 * eps);
  return dphi * symplectic_inverse(mid.at(tau));
}

}  // namespace

TEST_CASE("variation of parameters matches finite differences") {
  Rng r(301);
  const int n = 2;
  CoefficientModel model = random_affine_model(n, r);
  const double t = 1.3, h = 1e-3, lambda = 0.4;
  FlowSolution flow = integrate_fundamental(model, lambda, t, h);
  SensitivityResult sens = lambda_sensitivity(flow, Mat::Zero(2 * n, 2 * n));
  REQUIRE(!sens.tau.empty());
  CHECK(sens.tau.front() == 0.0);
  CHECK(sens.tau.back() == doctest::Approx(t).epsilon(1e-12));
  // The even subgrid indexes the flow grid two steps at a time.
  CHECK(sens.tau[1] == doctest::Approx(flow.grid()[2]).epsilon(1e-12));

  const int mid = static_cast<int>(sens.tau.size()) / 2;
  for (int k : {mid, static_cast<int>(sens.tau.size()) - 1}) {
    Mat want = fd_m2(model, lambda, t, h, sens.tau[k], 1e-5);
    CHECK((sens.m2[k] - want).norm() <= 1e-6 * std::max(1.0, want.norm()));
  }
  CHECK(sens.max_s2_symmetry_residual() <= 1e-9);
  // c2 is the advertised block of m2.
  CHECK((sens.c2(mid) - sens.m2[mid].topRightCorner(n, n)).norm() == 0.0);
}

TEST_CASE("transformed and conjugated routes agree") {
  Rng r(307);
  const int n = 2;
  CoefficientModel model = random_affine_model(n, r);
  const double t = 1.1, h = 1e-3;
  FlowSolution flow0 = integrate_fundamental(model, 0.2, t, h);
  Mat l1 = random_symplectic(n, r);
  Mat l2 = random_symplectic(n, r);
  // l2 parameter motion must keep l2 symplectic to first order:
  // d/dmu (L2 J L2^T) = 0 iff l2_prime l2^{-1} is Hamiltonian (J S form).
  Mat s = r.symmetric(2 * n, 0.3);
  Mat l2_prime = -standard_j(n) * s * l2;
  SensitivityResult a = lambda_sensitivity_transformed(
      flow0, l1, l2, Mat::Zero(2 * n, 2 * n), l2_prime);
  SensitivityResult b =
      lambda_sensitivity_conjugated(flow0, l1, l2, l2_prime);
  REQUIRE(a.tau.size() == b.tau.size());
  double worst = 0;
  for (size_t k = 0; k < a.tau.size(); ++k)
    worst = std::max(worst, (a.m2[k] - b.m2[k]).norm());
  CHECK(worst <= 1e-8);
  CHECK(a.max_s2_symmetry_residual() <= 1e-8);
  CHECK(b.max_s2_symmetry_residual() <= 1e-8);
}

TEST_CASE("transformed route against finite differences in mu") {
  Rng r(311);
  const int n = 1;
  CoefficientModel model = random_affine_model(n, r);
  const double t = 1.0, h = 5e-4, mu0 = 0.3;
  Mat l1 = random_symplectic(n, r);
  Mat s1 = r.symmetric(2 * n, 0.4), s2 = r.symmetric(2 * n, 0.5);
  // L1 fixed; L2(mu) = exp(-J s2 mu) starting from a random symplectic.
  Mat l2_base = random_symplectic(n, r);
  auto l2_at = [&](double mu) {
    return matrix_exp(-standard_j(n) * s2 * (mu - mu0)) * l2_base;
  };
  (void)s1;
  Mat l2 = l2_at(mu0);
  Mat l2_prime = -standard_j(n) * s2 * l2;

  FlowSolution flow0 = integrate_fundamental(model, mu0, t, h);
  SensitivityResult sens = lambda_sensitivity_transformed(
      flow0, l1, l2, Mat::Zero(2 * n, 2 * n), l2_prime);

  const double eps = 1e-5;
  FlowSolution up = integrate_fundamental(model, mu0 + eps, t, h);
  FlowSolution dn = integrate_fundamental(model, mu0 - eps, t, h);
  Mat phi_up = l1 * up.at(t) * l2_at(mu0 + eps);
  Mat phi_dn = l1 * dn.at(t) * l2_at(mu0 - eps);
  Mat phi_mid = l1 * flow0.at(t) * l2;
  Mat want = (phi_up - phi_dn) / (2 * eps) * symplectic_inverse(phi_mid);
  CHECK((sens.m2.back() - want).norm() <= 1e-5 * std::max(1.0, want.norm()));
}

TEST_CASE("starred route against finite differences in mu") {
  Rng r(313);
  const int n = 2;
  CoefficientModel model = random_affine_model(n, r);
  const double t = 1.2, h = 5e-4, mu0 = 0.1;
  auto [a0, b0] = oracle::admissible_pair(n, r);
  Mat delta0 = r.symmetric(n, 0.6);
  Mat ddelta = r.symmetric(n, 0.5);
  auto l2_at = [&](double mu) {
    Mat l2 = Mat::Zero(2 * n, 2 * n);
    l2.topLeftCorner(n, n) = delta0 + (mu - mu0) * ddelta;
    l2.topRightCorner(n, n) = -Mat::Identity(n, n);
    l2.bottomLeftCorner(n, n) = Mat::Identity(n, n);
    return l2;
  };
  Mat l1 = Mat::Zero(2 * n, 2 * n);
  l1.topLeftCorner(n, n) = a0;
  l1.topRightCorner(n, n) = -b0;
  l1.bottomLeftCorner(n, n) = b0;
  l1.bottomRightCorner(n, n) = a0;
  Mat l2_prime = Mat::Zero(2 * n, 2 * n);
  l2_prime.topLeftCorner(n, n) = ddelta;

  FlowSolution flow0 = integrate_fundamental(model, mu0, t, h);
  SensitivityResult sens =
      lambda_sensitivity_starred(flow0, l1, l2_at(mu0), l2_prime);

  const double eps = 1e-5;
  FlowSolution up = integrate_fundamental(model, mu0 + eps, t, h);
  FlowSolution dn = integrate_fundamental(model, mu0 - eps, t, h);
  Mat phi_up = l1 * up.at(t).transpose() * l2_at(mu0 + eps);
  Mat phi_dn = l1 * dn.at(t).transpose() * l2_at(mu0 - eps);
  Mat phi_mid = l1 * flow0.at(t).transpose() * l2_at(mu0);
  Mat want = (phi_up - phi_dn) / (2 * eps) * symplectic_inverse(phi_mid);
  CHECK((sens.m2.back() - want).norm() <= 1e-5 * std::max(1.0, want.norm()));
  CHECK(sens.max_s2_symmetry_residual() <= 1e-8);

  // The dedicated boundary-family quadrature gives the same C2.
  BoundaryFamilySensitivity fam = c2_boundary_family(flow0, a0, b0, ddelta);
  double worst = 0;
  for (size_t k = 0; k < fam.tau.size(); ++k)
    worst = std::max(
        worst, (fam.c2[k] - sens.c2(static_cast<int>(k))).norm());
  CHECK(worst <= 1e-9);
}

TEST_CASE("closed form: scalar Dirichlet sensitivity at lambda = 1") {
  // c0 = e = 1, d = 0 on [0, pi], left Dirichlet. The angle derivative in
  // lambda at the right end is -pi/2 when lambda = 1.
  SLProblem p;
  p.c0 = CoeffFn::constant(Mat::Identity(1, 1));
  p.d = CoeffFn::zero(1);
  p.e = CoeffFn::constant(Mat::Identity(1, 1));
  p.alpha0 = Mat::Zero(1, 1);
  p.beta0 = Mat::Identity(1, 1);
  p.gamma1 = Mat::Identity(1, 1);
  p.delta1 = Mat::Zero(1, 1);
  p.t = kPi;
  SLSolver solver(normalize_sl(p), 1e-3);
  BoundaryFamilySensitivity sens = solver.c2_quadrature(1.0);
  CHECK(sens.c2.back()(0, 0) == doctest::Approx(-kPi / 2).epsilon(1e-9));

  // Finite difference of the lifted end angle across lambda.
  const double eps = 1e-5;
  const double up = solver.end_angles(1.0 + eps)(0);
  const double dn = solver.end_angles(1.0 - eps)(0);
  LagrangianPair end = solver.frame_fn(1.0)(kPi);
  const double r2 = end.q2(0, 0) * end.q2(0, 0) + end.q1(0, 0) * end.q1(0, 0);
  CHECK((up - dn) / (2 * eps) ==
        doctest::Approx(sens.c2.back()(0, 0) / r2).epsilon(1e-5));
}
