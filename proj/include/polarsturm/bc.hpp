#pragma once

// Algebra of coupled self-adjoint boundary conditions. A pair of rows
//
//   beta_j q(0) + alpha_j p(0) - delta_j q(t) - gamma_j p(t) = 0,  j = 0, 1,
//
// admits a nontrivial solution exactly when
//
//   det([beta_0 alpha_0; beta_1 alpha_1]
//       - [delta_0 gamma_0; delta_1 gamma_1] Phi0(t)) = 0.
//
// When each row satisfies the self-adjointness condition (the matrix
// [delta_j gamma_j] Phi0 [-alpha_j beta_j]^T + beta_j alpha_j^T
// + delta_j gamma_j^T is symmetric), the determinant collapses by the
// block lemma N J N^T J = diag(-(a d^T - b c^T), -(d a^T - c b^T)) to the
// vanishing of det(a d^T - b c^T), where a, b, c, d mix the boundary data
// with the flow at t. Scaling by invertible R0, R1 turns that matrix into
// the corner block Q2 = R0 (a d^T - b c^T) R1^T of a frame, which is also
// the (1,1) block of the template family L0 + L1 Phi0 L2 + L3 Phi0^T L4
// with corner blocks determined by the boundary data.
//
// The dimension one case admits a complete classification: the template
// Phi = L0 + L1 Phi0 L2 is symplectic for every symplectic Phi0 exactly
// when det L0 + det L1 det L2 = 1 and L1^T J L0 J L2^T = 0, and the scalar
// corner x0 + x1 Qc + x2 Qs + x3 Pc + x4 Ps is realizable by a single
// product template iff x1 x4 = x2 x3, with five constructive sub-cases
// indexed by which of the x's vanish.

#include <vector>

#include "polarsturm/symplectic.hpp"

namespace polarsturm {

struct BoundaryRow {
  Mat alpha, beta;  // act at tau = 0
  Mat gamma, delta; // act at tau = t
};

struct CoupledBC {
  BoundaryRow row0, row1;
  Mat rho0, rho1;  // invertible normalizers R0, R1

  int n() const { return static_cast<int>(row0.alpha.rows()); }
  void validate() const;
};

// The row's self-adjointness matrix for a given transfer matrix; must be
// symmetric for the determinant reduction to apply.
Mat self_adjointness_matrix(const BoundaryRow& row, const Mat& phi0);
double self_adjointness_residual(const BoundaryRow& row, const Mat& phi0);

// Holds for every symplectic transfer matrix iff beta alpha^T
// + delta gamma^T is symmetric and beta G delta^T, beta G gamma^T,
// delta G alpha^T, gamma G alpha^T all vanish for every antisymmetric G
// (checked on the elementary antisymmetric basis; vacuous for n = 1).
struct UniversalSelfAdjointness {
  bool holds = true;
  double worst = 0.0;
};
UniversalSelfAdjointness universal_self_adjointness(const BoundaryRow& row,
                                                    double tol = 1e-9);

// Block determinant lemma for N = [a b; c d] with ab^T, cd^T symmetric.
struct DetLemmaReport {
  double hypothesis_residual;  // symmetry defects of ab^T and cd^T
  double block_residual;       // ||N J N^T J - diag(...)|| off the blocks
  double det_n;
  double det_reduced;          // det(a d^T - b c^T)
};
DetLemmaReport det_lemma_report(const Mat& a, const Mat& b, const Mat& c,
                                const Mat& d);

// Boundary data mixed with the flow at the right end.
struct ReducedBlocks {
  Mat a, b, c, d;
  Mat q2;  // R0 (a d^T - b c^T) R1^T
};
ReducedBlocks reduce_boundary_conditions(const CoupledBC& bc,
                                         const SymplecticFrame& phi0_t);

// det([beta alpha; ...] - [delta gamma; ...] Phi0(t)) directly.
double boundary_determinant(const CoupledBC& bc, const Mat& phi0_t);

// Corner blocks of the template family reproducing q2.
struct TemplateBlocks {
  Mat l0_11;
  Mat l1_11, l1_12;
  Mat l2_11, l2_21;
  Mat l3_11, l3_12;
  Mat l4_11, l4_21;
};
TemplateBlocks template_blocks(const CoupledBC& bc);
Mat reconstruct_q2(const TemplateBlocks& tb, const SymplecticFrame& phi0);

// alpha_0 beta_1^T + delta_0 gamma_1^T = beta_0 alpha_1^T
// + gamma_0 delta_1^T; under it l0_11 halves into either pure-0 or pure-t
// data.
double mixed_condition_residual(const CoupledBC& bc);

// ---- dimension one ----------------------------------------------------

// Phi = L0 + L1 Phi0 L2 (all 2x2) is symplectic for every symplectic Phi0
// iff det L0 + det L1 det L2 = 1 and L1^T J L0 J L2^T = 0. The solutions
// split into three shapes:
//   'a'  L0 symplectic, det L1 = det L2 = 0 with L1, L2 != 0,
//   'b'  L0 symplectic and L1 = 0 or L2 = 0,
//   'c'  L0 = 0 and det L1 det L2 = 1.
struct TemplateConditionReport {
  double det_defect = 0.0;
  double coupling_defect = 0.0;
  bool holds = false;
  char shape = '?';
};
TemplateConditionReport classify_template_2x2(const Mat& l0, const Mat& l1,
                                              const Mat& l2,
                                              double tol = 1e-9);

struct ScalarBC {
  double alpha0, beta0, gamma0, delta0;
  double alpha1, beta1, gamma1, delta1;
  double r0 = 1.0, r1 = 1.0;
};

// Coefficients of q2 = x0 + x1 Qc + x2 Qs + x3 Pc + x4 Ps for n = 1.
struct XCoefficients {
  double x0, x1, x2, x3, x4;
  // x1 x4 - x2 x3 = R^2 (delta1 gamma0 - delta0 gamma1)
  //                     (beta1 alpha0 - alpha1 beta0) identically.
  double product_identity_residual;
  // Under the mixed condition the same combination equals x0^2 / 4.
  double mixed_identity_residual;
};
XCoefficients x_coefficients(const ScalarBC& bc);
double scalar_q2(const XCoefficients& x, const Mat& phi0);
double scalar_mixed_condition_residual(const ScalarBC& bc);

// Constructive realizations of x1 Phi11 + x2 Phi12 + x3 Phi21 + x4 Phi22
// as (L1 Phi L2)_{11} with det L1 = det L2 = nu in {+1, -1}; requires
// x1 x4 = x2 x3 and not all x vanishing. a != 0 is a free row scale, b and
// c fill the remaining freedom.
struct TemplatePair {
  Mat l1, l2;
  char which;  // 'a'..'e', the sub-case used
};
TemplatePair realize_template_2x2(double x1, double x2, double x3, double x4,
                                  int nu, double a, double b, double c);

}  // namespace polarsturm
