#pragma once

// Time-dependent coefficients A, B, C of the Hamiltonian system, each with
// an affine parameter dependence
//
//   A(tau, lambda) = A_base(tau) + lambda * A_lin(tau),
//
// and likewise for B and C. The base and the linear part are constant,
// polynomial in tau, or tabulated on a grid (linear interpolation). A and C
// must be symmetric wherever evaluated; B is unconstrained.

#include <vector>

#include "polarsturm/linalg.hpp"

namespace polarsturm {

enum class CoeffKind { kZero, kConstant, kPolynomial, kTabulated };

class CoeffFn {
 public:
  CoeffFn() = default;

  static CoeffFn zero(int n);
  static CoeffFn constant(const Mat& value);
  // coeffs[k] multiplies tau^k.
  static CoeffFn polynomial(const std::vector<Mat>& coeffs);
  // Piecewise linear through (grid[i], values[i]); grid strictly increasing.
  static CoeffFn tabulated(const std::vector<double>& grid,
                           const std::vector<Mat>& values);

  Mat eval(double tau) const;
  int n() const { return n_; }
  CoeffKind kind() const { return kind_; }
  bool is_zero() const { return kind_ == CoeffKind::kZero; }
  const std::vector<Mat>& terms() const { return terms_; }
  const std::vector<double>& grid() const { return grid_; }

  // this + scale * other, exact for matching kinds (constant/constant,
  // polynomial/polynomial, tabulated on the same grid); mixed kinds fall
  // back to tabulation on the denser grid over [0, span].
  CoeffFn axpy(double scale, const CoeffFn& other, double span) const;

 private:
  CoeffKind kind_ = CoeffKind::kZero;
  int n_ = 0;
  std::vector<Mat> terms_;
  std::vector<double> grid_;
};

struct CoefficientModel {
  int n = 0;
  CoeffFn a_base, b_base, c_base;
  CoeffFn a_lin, b_lin, c_lin;  // zero when the model has no parameter part

  static CoefficientModel constant(const Mat& a, const Mat& b, const Mat& c);

  Mat a(double tau, double lambda) const;
  Mat b(double tau, double lambda) const;
  Mat c(double tau, double lambda) const;

  // S = [A B^T; B C], M = -J S = [B C; -A -B^T].
  Mat s(double tau, double lambda) const;
  Mat m(double tau, double lambda) const;
  // dM/dlambda = -J [A_lin B_lin^T; B_lin C_lin]; independent of lambda.
  Mat m_lambda(double tau) const;
  Mat s_lambda(double tau) const;

  bool has_parameter() const;

  // Shape and symmetry checks at sampled tau values; throws ConfigError.
  void validate(double t_max) const;
};

}  // namespace polarsturm
