#include "polarsturm/symplectic.hpp"

#include <cmath>

namespace polarsturm {

Mat standard_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return j;
}

Mat wronskian(const IsotropicPair& a, const IsotropicPair& b) {
  return a.p.transpose() * b.q - a.q.transpose() * b.p;
}

Mat SymplecticFrame::to_matrix() const {
  const int m = n();
  Mat phi(2 * m, 2 * m);
  phi.topLeftCorner(m, m) = q2;
  phi.topRightCorner(m, m) = q1;
  phi.bottomLeftCorner(m, m) = p2;
  phi.bottomRightCorner(m, m) = p1;
  return phi;
}

SymplecticFrame SymplecticFrame::from_matrix(const Mat& phi) {
  if (phi.rows() != phi.cols() || phi.rows() % 2 != 0)
    throw ConfigError("frame matrix must be square with even dimension");
  const int m = static_cast<int>(phi.rows()) / 2;
  return {phi.topLeftCorner(m, m), phi.topRightCorner(m, m),
          phi.bottomLeftCorner(m, m), phi.bottomRightCorner(m, m)};
}

SymplecticFrame SymplecticFrame::identity(int n) {
  return from_matrix(Mat::Identity(2 * n, 2 * n));
}

double symplectic_residual(const Mat& phi) {
  const int n = static_cast<int>(phi.rows()) / 2;
  Mat j = standard_j(n);
  double scale = phi.norm();
  return (phi.transpose() * j * phi - j).norm() / std::max(1.0, scale * scale);
}

bool is_symplectic(const Mat& phi, double tol) {
  return symplectic_residual(phi) <= tol;
}

Mat symplectic_inverse(const Mat& phi) {
  const int n = static_cast<int>(phi.rows()) / 2;
  Mat j = standard_j(n);
  return -j * phi.transpose() * j;
}

double antisymplectic_residual(const Mat& l) {
  const int n = static_cast<int>(l.rows()) / 2;
  Mat j = standard_j(n);
  double scale = l.norm();
  return (l * j * l.transpose() + j).norm() / std::max(1.0, scale * scale);
}

bool is_antisymplectic(const Mat& l, double tol) {
  return antisymplectic_residual(l) <= tol;
}

double form_factor_2x2(const Mat& l) {
  if (l.rows() != 2 || l.cols() != 2)
    throw ConfigError("form_factor_2x2 expects a 2x2 matrix");
  return l.determinant();
}

Coefficients recover_coefficients(const Mat& phi, const Mat& phidot,
                                  double tol) {
  const int n = static_cast<int>(phi.rows()) / 2;
  Mat j = standard_j(n);
  // Phidot J Phi^T is symmetric exactly when Phidot Phi^{-1} = -J S for a
  // symmetric S; reject inputs that are not a Hamiltonian flow derivative.
  if (symmetry_residual(phidot * j * phi.transpose()) > tol)
    throw NumericError(
        "recover_coefficients: derivative is not Hamiltonian to tolerance");
  SymplecticFrame f = SymplecticFrame::from_matrix(phi);
  SymplecticFrame fd = SymplecticFrame::from_matrix(phidot);
  Coefficients out;
  out.a = fd.p1 * f.p2.transpose() - fd.p2 * f.p1.transpose();
  out.c = fd.q1 * f.q2.transpose() - fd.q2 * f.q1.transpose();
  out.b = -fd.q1 * f.p2.transpose() + fd.q2 * f.p1.transpose();
  return out;
}

Mat random_symplectic(int n, Rng& rng, double scale, int factors) {
  Mat j = standard_j(n);
  Mat phi = Mat::Identity(2 * n, 2 * n);
  for (int i = 0; i < factors; ++i) {
    Mat s = rng.symmetric(2 * n, scale);
    phi = phi * matrix_exp(-j * s);
  }
  return phi;
}

FrameIdentityReport check_frame_identities(const SymplecticFrame& f) {
  const int n = f.n();
  Mat i = Mat::Identity(n, n);
  FrameIdentityReport r{};
  double w1 = (f.p1.transpose() * f.q2 - f.q1.transpose() * f.p2 - i).norm();
  double w2 = (f.p1 * f.q2.transpose() - f.p2 * f.q1.transpose() - i).norm();
  r.wronskian_residual = std::max(w1, w2);
  double s1 = (f.q1.transpose() * f.p1 - f.p1.transpose() * f.q1).norm();
  double s2 = (f.q2.transpose() * f.p2 - f.p2.transpose() * f.q2).norm();
  double s3 = (f.q1 * f.q2.transpose() - f.q2 * f.q1.transpose()).norm();
  double s4 = (f.p1 * f.p2.transpose() - f.p2 * f.p1.transpose()).norm();
  r.isotropy_residual = std::max({s1, s2, s3, s4});
  r.quotient_residual = 0.0;
  r.quotients_checked = 0;
  struct Quot {
    const Mat *num, *den;
    bool den_on_right;  // num * den^{-1} vs den^{-1} * num
  };
  const Quot quots[] = {
      {&f.p2, &f.q2, true},  {&f.q1, &f.p1, true},
      {&f.q2, &f.p2, true},  {&f.p1, &f.q1, true},
      {&f.q1, &f.q2, false}, {&f.p1, &f.p2, false},
      {&f.q2, &f.q1, false}, {&f.p2, &f.p1, false},
  };
  for (const auto& q : quots) {
    if (cond_2(*q.den) > 1e8) continue;  // skip near-singular quotients
    Mat m = q.den_on_right
                ? Mat(*q.num * q.den->inverse())
                : Mat(q.den->inverse() * *q.num);
    r.quotient_residual =
        std::max(r.quotient_residual, (m - m.transpose()).norm() /
                                          std::max(1.0, m.norm()));
    ++r.quotients_checked;
  }
  return r;
}

}  // namespace polarsturm
