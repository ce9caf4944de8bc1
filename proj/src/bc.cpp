#include "polarsturm/bc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polarsturm {

namespace {

void check_square(const Mat& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw ConfigError(std::string(what) + " has the wrong dimensions");
}

}  // namespace

void CoupledBC::validate() const {
  const int dim = n();
  if (dim <= 0) throw ConfigError("empty boundary data");
  for (const BoundaryRow* row : {&row0, &row1}) {
    check_square(row->alpha, dim, "alpha");
    check_square(row->beta, dim, "beta");
    check_square(row->gamma, dim, "gamma");
    check_square(row->delta, dim, "delta");
  }
  check_square(rho0, dim, "rho0");
  check_square(rho1, dim, "rho1");
  if (cond_2(rho0) > kCondGuard || cond_2(rho1) > kCondGuard)
    throw ConfigError("normalizers must be invertible");
}

Mat self_adjointness_matrix(const BoundaryRow& row, const Mat& phi0) {
  const int n = static_cast<int>(row.alpha.rows());
  Mat left(n, 2 * n);
  left.leftCols(n) = row.delta;
  left.rightCols(n) = row.gamma;
  Mat right(2 * n, n);
  right.topRows(n) = -row.alpha.transpose();
  right.bottomRows(n) = row.beta.transpose();
  return left * phi0 * right + row.beta * row.alpha.transpose() +
         row.delta * row.gamma.transpose();
}

double self_adjointness_residual(const BoundaryRow& row, const Mat& phi0) {
  return symmetry_residual(self_adjointness_matrix(row, phi0));
}

UniversalSelfAdjointness universal_self_adjointness(const BoundaryRow& row,
                                                    double tol) {
  UniversalSelfAdjointness out;
  out.worst = symmetry_residual(row.beta * row.alpha.transpose() +
                                row.delta * row.gamma.transpose());
  const int n = static_cast<int>(row.alpha.rows());
  // G ranges over e_k e_l^T - e_l e_k^T, so each product reduces to a
  // difference of outer products of matrix columns.
  auto probe = [&](const Mat& u, const Mat& v) {
    for (int k = 0; k < n; ++k)
      for (int l = k + 1; l < n; ++l) {
        double r = (u.col(k) * v.col(l).transpose() -
                    u.col(l) * v.col(k).transpose())
                       .norm();
        out.worst = std::max(out.worst, r);
      }
  };
  probe(row.beta, row.delta);
  probe(row.beta, row.gamma);
  probe(row.delta, row.alpha);
  probe(row.gamma, row.alpha);
  out.holds = out.worst <= tol;
  return out;
}

DetLemmaReport det_lemma_report(const Mat& a, const Mat& b, const Mat& c,
                                const Mat& d) {
  const int n = static_cast<int>(a.rows());
  DetLemmaReport rep;
  rep.hypothesis_residual =
      std::max(symmetry_residual(a * b.transpose()),
               symmetry_residual(c * d.transpose()));
  Mat nn(2 * n, 2 * n);
  nn.topLeftCorner(n, n) = a;
  nn.topRightCorner(n, n) = b;
  nn.bottomLeftCorner(n, n) = c;
  nn.bottomRightCorner(n, n) = d;
  Mat j = standard_j(n);
  Mat prod = nn * j * nn.transpose() * j;
  Mat expect = Mat::Zero(2 * n, 2 * n);
  expect.topLeftCorner(n, n) =
      -a * d.transpose() + b * c.transpose();
  expect.bottomRightCorner(n, n) =
      -d * a.transpose() + c * b.transpose();
  rep.block_residual = (prod - expect).norm();
  rep.det_n = nn.determinant();
  rep.det_reduced = (a * d.transpose() - b * c.transpose()).determinant();
  return rep;
}

ReducedBlocks reduce_boundary_conditions(const CoupledBC& bc,
                                         const SymplecticFrame& phi0_t) {
  bc.validate();
  const Mat& qc = phi0_t.q2;
  const Mat& qs = phi0_t.q1;
  const Mat& pc = phi0_t.p2;
  const Mat& ps = phi0_t.p1;
  ReducedBlocks out;
  out.a = bc.row0.beta - bc.row0.delta * qc - bc.row0.gamma * pc;
  out.b = bc.row0.alpha - bc.row0.delta * qs - bc.row0.gamma * ps;
  out.c = bc.row1.beta - bc.row1.delta * qc - bc.row1.gamma * pc;
  out.d = bc.row1.alpha - bc.row1.delta * qs - bc.row1.gamma * ps;
  out.q2 = bc.rho0 *
           (out.a * out.d.transpose() - out.b * out.c.transpose()) *
           bc.rho1.transpose();
  return out;
}

double boundary_determinant(const CoupledBC& bc, const Mat& phi0_t) {
  const int n = bc.n();
  Mat zero_side(2 * n, 2 * n), t_side(2 * n, 2 * n);
  zero_side.topLeftCorner(n, n) = bc.row0.beta;
  zero_side.topRightCorner(n, n) = bc.row0.alpha;
  zero_side.bottomLeftCorner(n, n) = bc.row1.beta;
  zero_side.bottomRightCorner(n, n) = bc.row1.alpha;
  t_side.topLeftCorner(n, n) = bc.row0.delta;
  t_side.topRightCorner(n, n) = bc.row0.gamma;
  t_side.bottomLeftCorner(n, n) = bc.row1.delta;
  t_side.bottomRightCorner(n, n) = bc.row1.gamma;
  return (zero_side - t_side * phi0_t).determinant();
}

TemplateBlocks template_blocks(const CoupledBC& bc) {
  bc.validate();
  TemplateBlocks tb;
  tb.l0_11 = bc.rho0 *
             (bc.row0.beta * bc.row1.alpha.transpose() -
              bc.row0.alpha * bc.row1.beta.transpose() +
              bc.row0.delta * bc.row1.gamma.transpose() -
              bc.row0.gamma * bc.row1.delta.transpose()) *
             bc.rho1.transpose();
  tb.l1_11 = bc.rho0 * bc.row0.delta;
  tb.l1_12 = bc.rho0 * bc.row0.gamma;
  tb.l2_11 = -bc.row1.alpha.transpose() * bc.rho1.transpose();
  tb.l2_21 = bc.row1.beta.transpose() * bc.rho1.transpose();
  tb.l3_11 = bc.rho0 * bc.row0.alpha;
  tb.l3_12 = -bc.rho0 * bc.row0.beta;
  tb.l4_11 = bc.row1.delta.transpose() * bc.rho1.transpose();
  tb.l4_21 = bc.row1.gamma.transpose() * bc.rho1.transpose();
  return tb;
}

Mat reconstruct_q2(const TemplateBlocks& tb, const SymplecticFrame& phi0) {
  const int n = static_cast<int>(tb.l0_11.rows());
  Mat row1(n, 2 * n), col2(2 * n, n), row3(n, 2 * n), col4(2 * n, n);
  row1.leftCols(n) = tb.l1_11;
  row1.rightCols(n) = tb.l1_12;
  col2.topRows(n) = tb.l2_11;
  col2.bottomRows(n) = tb.l2_21;
  row3.leftCols(n) = tb.l3_11;
  row3.rightCols(n) = tb.l3_12;
  col4.topRows(n) = tb.l4_11;
  col4.bottomRows(n) = tb.l4_21;
  Mat phi = phi0.to_matrix();
  return tb.l0_11 + row1 * phi * col2 + row3 * phi.transpose() * col4;
}

double mixed_condition_residual(const CoupledBC& bc) {
  return (bc.row0.alpha * bc.row1.beta.transpose() +
          bc.row0.delta * bc.row1.gamma.transpose() -
          bc.row0.beta * bc.row1.alpha.transpose() -
          bc.row0.gamma * bc.row1.delta.transpose())
      .norm();
}

// ---- dimension one ----------------------------------------------------

TemplateConditionReport classify_template_2x2(const Mat& l0, const Mat& l1,
                                              const Mat& l2, double tol) {
  if (l0.rows() != 2 || l0.cols() != 2 || l1.rows() != 2 || l1.cols() != 2 ||
      l2.rows() != 2 || l2.cols() != 2)
    throw ConfigError("classification expects 2x2 blocks");
  TemplateConditionReport rep;
  double d0 = l0.determinant(), d1 = l1.determinant(),
         d2 = l2.determinant();
  rep.det_defect = std::abs(d0 + d1 * d2 - 1.0);
  Mat j = standard_j(1);
  rep.coupling_defect =
      (l1.transpose() * j * l0 * j * l2.transpose()).norm();
  rep.holds = rep.det_defect <= tol && rep.coupling_defect <= tol;
  if (!rep.holds) return rep;
  if (l0.norm() <= tol)
    rep.shape = 'c';
  else if (l1.norm() <= tol || l2.norm() <= tol)
    rep.shape = 'b';
  else if (std::abs(d1) <= tol && std::abs(d2) <= tol)
    rep.shape = 'a';
  return rep;
}

XCoefficients x_coefficients(const ScalarBC& bc) {
  const double r = bc.r0 * bc.r1;
  if (r == 0.0) throw ConfigError("normalizers must be nonzero");
  XCoefficients x;
  x.x0 = r * (bc.beta0 * bc.alpha1 - bc.alpha0 * bc.beta1 +
              bc.delta0 * bc.gamma1 - bc.gamma0 * bc.delta1);
  x.x1 = r * (bc.alpha0 * bc.delta1 - bc.delta0 * bc.alpha1);
  x.x2 = r * (bc.delta0 * bc.beta1 - bc.beta0 * bc.delta1);
  x.x3 = r * (bc.alpha0 * bc.gamma1 - bc.gamma0 * bc.alpha1);
  x.x4 = r * (bc.gamma0 * bc.beta1 - bc.beta0 * bc.gamma1);
  double lhs = x.x1 * x.x4 - x.x2 * x.x3;
  x.product_identity_residual =
      std::abs(lhs - r * r * (bc.delta1 * bc.gamma0 - bc.delta0 * bc.gamma1) *
                         (bc.beta1 * bc.alpha0 - bc.alpha1 * bc.beta0));
  x.mixed_identity_residual = std::abs(lhs - 0.25 * x.x0 * x.x0);
  return x;
}

double scalar_q2(const XCoefficients& x, const Mat& phi0) {
  return x.x0 + x.x1 * phi0(0, 0) + x.x2 * phi0(0, 1) + x.x3 * phi0(1, 0) +
         x.x4 * phi0(1, 1);
}

double scalar_mixed_condition_residual(const ScalarBC& bc) {
  return std::abs(bc.alpha0 * bc.beta1 + bc.delta0 * bc.gamma1 -
                  bc.beta0 * bc.alpha1 - bc.gamma0 * bc.delta1);
}

TemplatePair realize_template_2x2(double x1, double x2, double x3, double x4,
                                  int nu, double a, double b, double c) {
  if (nu != 1 && nu != -1) throw ConfigError("nu must be +1 or -1");
  if (a == 0.0) throw ConfigError("the free scale a must be nonzero");
  double scale = std::max({std::abs(x1), std::abs(x2), std::abs(x3),
                           std::abs(x4)});
  if (scale == 0.0)
    throw ConfigError("at least one coefficient must be nonzero");
  if (std::abs(x1 * x4 - x2 * x3) > 1e-12 * scale * scale)
    throw ConfigError("coefficients must satisfy x1 x4 = x2 x3");
  auto zero = [&](double x) { return std::abs(x) <= 1e-13 * scale; };

  TemplatePair out;
  out.l1.resize(2, 2);
  out.l2.resize(2, 2);
  if (!zero(x1)) {
    out.which = 'a';
    out.l1 << a, a * x3 / x1, b, nu / a + b * x3 / x1;
    out.l2 << x1 / a, c, x2 / a, nu * a / x1 + c * x2 / x1;
  } else if (!zero(x4) && zero(x3)) {
    out.which = 'b';
    out.l1 << a * x2 / x4, a, -nu / a + b * x2 / x4, b;
    out.l2 << 0, -nu * a / x4, x4 / a, c;
  } else if (!zero(x4) && zero(x2)) {
    out.which = 'c';
    out.l1 << 0, a, -nu / a, b;
    out.l2 << x3 / a, -nu * a / x4 + c * x3 / x4, x4 / a, c;
  } else if (zero(x4) && zero(x2) && !zero(x3)) {
    out.which = 'd';
    out.l1 << 0, a, -nu / a, b;
    out.l2 << x3 / a, c, 0, nu * a / x3;
  } else if (zero(x4) && zero(x3) && !zero(x2)) {
    out.which = 'e';
    out.l1 << a, 0, b, nu / a;
    out.l2 << 0, -nu * a / x2, x2 / a, c;
  } else {
    throw ConfigError("coefficient pattern admits no product template");
  }
  return out;
}

}  // namespace polarsturm
