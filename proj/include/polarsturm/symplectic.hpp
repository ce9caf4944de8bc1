#pragma once

// Symplectic frames for linear Hamiltonian systems
//
//   Qdot = B Q + C P,   Pdot = -A Q - B^T P,
//
// written as Phi' = M Phi with M = -J S, J = [0 -I; I 0],
// S = [A B^T; B C]. A frame stacks two isotropic solutions with unit
// Wronskian,
//
//   Phi = [Q2 Q1; P2 P1],
//
// which is exactly the statement that Phi is symplectic; its inverse is
// then [P1^T -Q1^T; -P2^T Q2^T] with no factorization needed.

#include <vector>

#include "polarsturm/linalg.hpp"

namespace polarsturm {

Mat standard_j(int n);

struct IsotropicPair {
  Mat q, p;
};

// W(a; b) = a.p^T b.q - a.q^T b.p, constant along the flow.
Mat wronskian(const IsotropicPair& a, const IsotropicPair& b);

struct SymplecticFrame {
  Mat q2, q1, p2, p1;

  int n() const { return static_cast<int>(q2.rows()); }
  Mat to_matrix() const;
  static SymplecticFrame from_matrix(const Mat& phi);
  static SymplecticFrame identity(int n);
};

// ||Phi^T J Phi - J||_F / max(1, ||Phi||_F^2); the squared scale matches
// how the defect grows under Phi -> c Phi.
double symplectic_residual(const Mat& phi);
bool is_symplectic(const Mat& phi, double tol = 1e-9);

// -J Phi^T J; equals the inverse when Phi is symplectic.
Mat symplectic_inverse(const Mat& phi);

// ||L J L^T + J|| / max(1, ||L||^2); such L reverse the symplectic form.
double antisymplectic_residual(const Mat& l);
bool is_antisymplectic(const Mat& l, double tol = 1e-9);

// For 2x2 blocks, L J L^T = det(L) J; returns det L for diagnostics.
double form_factor_2x2(const Mat& l);

struct Coefficients {
  Mat a, b, c;
};

// Recover the coefficient matrices from a frame and its time derivative:
//   A = P1dot P2^T - P2dot P1^T,  C = Q1dot Q2^T - Q2dot Q1^T,
//   B = -Q1dot P2^T + Q2dot P1^T.
// Valid when Phidot J Phi^T is symmetric (checked against tol).
Coefficients recover_coefficients(const Mat& phi, const Mat& phidot,
                                  double tol = 1e-8);

// Product of a few exponentials exp(-J S_i) with random symmetric S_i:
// exactly symplectic up to roundoff and reproducible from the seed.
Mat random_symplectic(int n, Rng& rng, double scale = 1.0, int factors = 3);

// Residuals for the standard frame identities, all of which vanish for a
// symplectic Phi = [Q2 Q1; P2 P1]:
//   P1^T Q2 - Q1^T P2 = I     Q1^T P1, Q2^T P2 symmetric
//   P1 Q2^T - P2 Q1^T = I     Q1 Q2^T, P1 P2^T symmetric
// plus the quotient symmetries (P2 Q2^{-1}, Q2^{-1} Q1, Q1 P1^{-1}, ...)
// evaluated only when the inverted block passes the conditioning guard.
struct FrameIdentityReport {
  double wronskian_residual;     // max over the two I_n identities
  double isotropy_residual;      // max over the four symmetry identities
  double quotient_residual;      // max over well-conditioned quotients
  int quotients_checked;
  bool ok(double tol = 1e-9) const {
    return wronskian_residual <= tol && isotropy_residual <= tol &&
           quotient_residual <= tol;
  }
};
FrameIdentityReport check_frame_identities(const SymplecticFrame& f);

}  // namespace polarsturm
