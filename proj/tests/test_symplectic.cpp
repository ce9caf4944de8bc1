#include <doctest.h>

#include "polarsturm/model.hpp"
#include "polarsturm/symplectic.hpp"
#include "support/oracles.hpp"

using namespace polarsturm;

TEST_CASE("standard form matrix") {
  Mat j = standard_j(2);
  CHECK((j * j + Mat::Identity(4, 4)).norm() == 0.0);
  CHECK((j + j.transpose()).norm() == 0.0);
}

TEST_CASE("random symplectic matrices are symplectic and reproducible") {
  Rng r(101);
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(r.bits() % 3);
    Mat phi = random_symplectic(n, r);
    CHECK(symplectic_residual(phi) <= 1e-12);
    CHECK(is_symplectic(phi));
  }
  Rng a(55), b(55);
  CHECK((random_symplectic(3, a) - random_symplectic(3, b)).norm() == 0.0);
}

TEST_CASE("frame round trip and inverse without factorization") {
  Rng r(7);
  Mat phi = random_symplectic(3, r);
  SymplecticFrame f = SymplecticFrame::from_matrix(phi);
  CHECK((f.to_matrix() - phi).norm() == 0.0);
  CHECK((symplectic_inverse(phi) * phi - Mat::Identity(6, 6)).norm() <=
        1e-12);
  SymplecticFrame id = SymplecticFrame::identity(2);
  CHECK(symplectic_residual(id.to_matrix()) == 0.0);
}

TEST_CASE("wronskian of the frame column pairs") {
  Rng r(31);
  Mat phi = random_symplectic(2, r);
  SymplecticFrame f = SymplecticFrame::from_matrix(phi);
  IsotropicPair second{f.q2, f.p2}, first{f.q1, f.p1};
  // Unit cross pairing, vanishing self pairing: exactly symplecticity.
  CHECK((wronskian(first, second) - Mat::Identity(2, 2)).norm() <= 1e-12);
  CHECK(wronskian(first, first).norm() <= 1e-12);
  CHECK(wronskian(second, second).norm() <= 1e-12);
}

TEST_CASE("coefficients are recovered from the frame derivative") {
  Rng r(41);
  const int n = 2;
  Mat a = r.symmetric(n, 0.8);
  Mat b = r.matrix(n, n, 0.6);
  Mat c = r.symmetric_in(n, 0.4, 1.7);
  CoefficientModel model = CoefficientModel::constant(a, b, c);
  Mat phi = random_symplectic(n, r);
  Mat phidot = model.m(0.0, 0.0) * phi;
  Coefficients got = recover_coefficients(phi, phidot);
  CHECK((got.a - a).norm() <= 1e-10);
  CHECK((got.b - b).norm() <= 1e-10);
  CHECK((got.c - c).norm() <= 1e-10);

  // A derivative that is not Hamiltonian for this frame must be refused.
  Mat bad = r.matrix(2 * n, 2 * n);
  CHECK_THROWS_AS(recover_coefficients(phi, bad), NumericError);
}

TEST_CASE("frame identity report accepts symplectic, flags corrupted") {
  Rng r(61);
  Mat phi = random_symplectic(3, r);
  SymplecticFrame f = SymplecticFrame::from_matrix(phi);
  FrameIdentityReport rep = check_frame_identities(f);
  CHECK(rep.ok());
  CHECK(rep.quotients_checked > 0);
  f.q1(0, 1) += 1e-3;
  CHECK(!check_frame_identities(f).ok());
}

TEST_CASE("antisymplectic detection and the 2x2 form factor") {
  Mat flip(2, 2);
  flip << 1, 0, 0, -1;
  CHECK(antisymplectic_residual(flip) <= 1e-15);
  CHECK(is_antisymplectic(flip));
  CHECK(form_factor_2x2(flip) == doctest::Approx(-1.0));
  Rng r(47);
  Mat l = r.matrix(2, 2);
  Mat j = standard_j(1);
  CHECK((l * j * l.transpose() - form_factor_2x2(l) * j).norm() <= 1e-13);
  Mat rot = random_symplectic(1, r);
  CHECK(form_factor_2x2(rot) == doctest::Approx(1.0).epsilon(1e-12));
}
