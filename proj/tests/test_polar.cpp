#include <doctest.h>

#include <cmath>
#include <complex>

#include "polarsturm/polar.hpp"
#include "support/oracles.hpp"

using namespace polarsturm;
using CMat = Eigen::MatrixXcd;

namespace {

LagrangianPair pair_from_frame(const Mat& phi) {
  SymplecticFrame f = SymplecticFrame::from_matrix(phi);
  return {f.q2, f.q1};
}

CMat unitary_from(const UnitaryReduction& red) {
  const std::complex<double> im(0, 1);
  return red.re_v.cast<std::complex<double>>() +
         im * red.im_v.cast<std::complex<double>>();
}

}  // namespace

TEST_CASE("reduction produces a unitary symmetric matrix") {
  Rng r(201);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(r.bits() % 3);
    LagrangianPair pair = pair_from_frame(random_symplectic(n, r));
    UnitaryReduction red = unitary_reduction(pair);
    CHECK(red.unitary_residual <= 1e-10);
    CHECK(red.symmetry_residual <= 1e-10);
    CMat v = unitary_from(red);
    CHECK((v * v.adjoint() - CMat::Identity(n, n)).norm() <= 1e-10);
    CHECK((v - v.transpose()).norm() <= 1e-10);
  }
}

TEST_CASE("angles and eigenbasis reconstruct the unitary") {
  Rng r(211);
  const int n = 3;
  LagrangianPair pair = pair_from_frame(random_symplectic(n, r));
  UnitaryReduction red = unitary_reduction(pair);
  Vec phi = raw_half_angles(red);
  for (int j = 0; j < n; ++j) {
    CHECK(phi(j) > -kPi / 2);
    CHECK(phi(j) <= kPi / 2);
  }
  CMat recon = CMat::Zero(n, n);
  const std::complex<double> im(0, 1);
  for (int j = 0; j < n; ++j)
    recon += std::exp(2.0 * im * phi(j)) *
             (red.omega.col(j) * red.omega.col(j).transpose()).cast<
                 std::complex<double>>();
  CHECK((recon - unitary_from(red)).norm() <= 1e-9);
}

TEST_CASE("real radius factors the pair") {
  Rng r(223);
  const int n = 2;
  for (int trial = 0; trial < 20; ++trial) {
    LagrangianPair pair = pair_from_frame(random_symplectic(n, r));
    UnitaryReduction red = unitary_reduction(pair);
    Vec phi = raw_half_angles(red);
    RealRadius rad = real_radius(pair, red.omega, phi);
    CHECK(rad.imag_residual <= 1e-8);
    // Q2 + i Q1 = r * Omega e^{i phi} Omega^T up to the residual.
    const std::complex<double> im(0, 1);
    CMat rot = CMat::Zero(n, n);
    for (int j = 0; j < n; ++j)
      rot += std::exp(im * phi(j)) *
             (red.omega.col(j) * red.omega.col(j).transpose()).cast<
                 std::complex<double>>();
    CMat plus = pair.q2.cast<std::complex<double>>() +
                im * pair.q1.cast<std::complex<double>>();
    CHECK((plus - rad.r.cast<std::complex<double>>() * rot).norm() <= 1e-8);
  }
}

TEST_CASE("scalar rotation has angle tau") {
  for (double tau : {0.1, 0.7, 1.4}) {
    LagrangianPair pair{Mat::Constant(1, 1, std::cos(tau)),
                        Mat::Constant(1, 1, std::sin(tau))};
    UnitaryReduction red = unitary_reduction(pair);
    Vec phi = raw_half_angles(red);
    CHECK(phi(0) == doctest::Approx(tau).epsilon(1e-12));
  }
}

TEST_CASE("lift of the rotation family is linear with exact events") {
  auto frame = [](double tau) {
    return LagrangianPair{Mat::Constant(1, 1, std::cos(tau)),
                          Mat::Constant(1, 1, std::sin(tau))};
  };
  auto grid = uniform_grid(0.0, 4 * kPi, 101);
  AngleTrack tr = lift_angles(frame, grid, Vec::Zero(1));
  CHECK(tr.end_phi()(0) == doctest::Approx(4 * kPi).epsilon(1e-10));
  // Levels pi/2 + k pi are hit at those very parameters, all upward.
  REQUIRE(tr.det_events.size() == 4);
  for (const auto& e : tr.det_events) {
    CHECK(e.direction == +1);
    CHECK(!e.boundary);
    CHECK(e.param == doctest::Approx(e.level).epsilon(1e-9));
  }
  // sin levels at pi, 2pi, 3pi inside, 4pi flagged as boundary.
  int interior = 0;
  for (const auto& e : tr.sin_events)
    if (!e.boundary) ++interior;
  CHECK(interior == 3);
  MonotonicityReport mono = check_monotone(tr, +1);
  CHECK(mono.ok);
}

TEST_CASE("branches that cross stay correctly matched") {
  // Two decoupled rotations at speeds 1 and 2: the half angles collide
  // repeatedly and the assignment has to keep them apart.
  auto frame = [](double tau) {
    Mat q2 = Mat::Zero(2, 2), q1 = Mat::Zero(2, 2);
    q2(0, 0) = std::cos(tau);
    q2(1, 1) = std::cos(2 * tau);
    q1(0, 0) = std::sin(tau);
    q1(1, 1) = std::sin(2 * tau);
    return LagrangianPair{q2, q1};
  };
  const double t = 3 * kPi;
  auto grid = uniform_grid(0.0, t, 257);
  AngleTrack tr = lift_angles(frame, grid, Vec::Zero(2));
  Vec end = tr.end_phi();
  const double e0 = std::min(end(0), end(1));
  const double e1 = std::max(end(0), end(1));
  CHECK(e0 == doctest::Approx(t).epsilon(1e-9));
  CHECK(e1 == doctest::Approx(2 * t).epsilon(1e-9));
}

TEST_CASE("initial value mismatch is refused") {
  auto frame = [](double tau) {
    return LagrangianPair{Mat::Constant(1, 1, std::cos(tau)),
                          Mat::Constant(1, 1, std::sin(tau))};
  };
  auto grid = uniform_grid(0.0, 1.0, 33);
  Vec wrong = Vec::Constant(1, 0.3);
  CHECK_THROWS_AS(lift_angles(frame, grid, wrong), NumericError);
}

TEST_CASE("crossing bookkeeping") {
  std::vector<CrossingEvent> events = {
      {0.1, 0, kPi / 2, +1, false},
      {0.5, 1, kPi / 2, -1, false},
      {0.9, 0, 3 * kPi / 2, +1, false},
      {1.0, 0, 5 * kPi / 2, +1, true},
  };
  CrossingCount c = count_crossings(events, 0.0, 1.0);
  CHECK(c.total == 3);
  CHECK(c.upward == 2);
  CHECK(c.downward == 1);
  CHECK(c.net == 1);
  CHECK(c.boundary == 1);
  CrossingCount window = count_crossings(events, 0.3, 0.95);
  CHECK(window.total == 2);
}

TEST_CASE("scalar lifts against closed forms") {
  // k2 = 1, k1 = 0 is the identity lift.
  CHECK(scalar_xi(0, 1, 2.3) == doctest::Approx(2.3).epsilon(1e-12));
  // Value at a pole of tan, and continuity through it.
  CHECK(scalar_xi(0.7, 2.0, kPi / 2) == doctest::Approx(kPi / 2));
  const double below = scalar_xi(0.7, 2.0, kPi / 2 - 1e-6);
  const double above = scalar_xi(0.7, 2.0, kPi / 2 + 1e-6);
  CHECK(below < kPi / 2);
  CHECK(above > kPi / 2);
  CHECK(above - below <= 1e-4);
  // Reflection for negative slope and the zeta companion.
  CHECK(scalar_xi(0.3, -0.8, 1.1) ==
        doctest::Approx(-scalar_xi(-0.3, 0.8, -1.1)).epsilon(1e-12));
  CHECK(scalar_zeta(0.4, 1.5, 0.9) ==
        doctest::Approx(kPi / 2 - scalar_xi(0.4, 1.5, 0.9)).epsilon(1e-12));
  // tan(xi(tau)) = k1 + k2 tan(tau) away from poles.
  for (double tau : {0.2, 1.1, 2.9, 4.4}) {
    const double xi = scalar_xi(0.6, 1.7, tau);
    CHECK(std::tan(xi) ==
          doctest::Approx(0.6 + 1.7 * std::tan(tau)).epsilon(1e-8));
  }
}

TEST_CASE("matrix scalar lifts act through the spectrum") {
  Rng r(229);
  Mat s = r.symmetric(3, 1.2);
  EigH e = eigh(s);
  Mat got = scalar_xi_matrix(0.4, 1.3, s);
  Mat want = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    want += scalar_xi(0.4, 1.3, e.values(i)) * e.vectors.col(i) *
            e.vectors.col(i).transpose();
  CHECK((got - want).norm() <= 1e-10);
  Mat zeta = scalar_zeta_matrix(0.4, 1.3, s);
  CHECK((zeta + got - kPi / 2 * Mat::Identity(3, 3)).norm() <= 1e-10);
}
