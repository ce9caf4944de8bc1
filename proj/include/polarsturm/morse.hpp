#pragma once

// Morse index of the quadratic action
//
//   <g, L g> = int_0^t [ (gdot, C^{-1} gdot) - 2 (gdot, C^{-1} B g)
//                        - (g, (A - B^T C^{-1} B) g) ] dtau
//              + (g(0), N g(0)),
//
// on paths with g(t) = 0 and free left end (C > 0). The index equals the
// number of conjugate instants in (0, t): parameters where det Q2 = 0 for
// the frame pair Q2 = Qc + Qs N, Q1 = Qs built from the fundamental flow,
// equivalently where some polar branch crosses pi/2 + k pi. Since phi(0)=0,
// each branch contributes mu_j = round(phi_j(t) / pi) and the index is the
// sum.
//
// The discretized form on hat functions (left node kept, right node
// clamped) provides an independent count as the negative inertia of a
// block-tridiagonal stiffness matrix.

#include "polarsturm/flow.hpp"
#include "polarsturm/polar.hpp"

namespace polarsturm {

struct ActionProblem {
  CoefficientModel model;  // evaluated at lambda = 0
  Mat n_left;              // symmetric boundary matrix at tau = 0
  double t = 0.0;

  void validate() const;
};

struct MorseResult {
  int mu = 0;
  std::vector<int> mu_j;
  Vec phi_end;
  AngleTrack track;     // det_events are the conjugate instants
  double min_margin;    // distance of phi_j(t) from the nearest half level
};

// grid_nodes is the initial lift grid (refined automatically); 0 picks a
// default based on t.
MorseResult morse_index(const ActionProblem& p, double h, int grid_nodes = 0,
                        const LiftOptions& opts = {});

// The frame pair (Q2, Q1)(tau) used by morse_index.
FrameFn morse_frame_fn(const FlowSolution& flow, const Mat& n_left);

// Galerkin matrix of the action on hat functions over m equal intervals;
// midpoint quadrature for the coefficient terms. Dimension n*m (nodes
// 0..m-1).
Mat discretized_action_form(const ActionProblem& p, int m);

// Negative eigenvalue counts: dense eigendecomposition, and the
// block-tridiagonal Schur-complement recursion (falls back to dense when a
// pivot block is ill-conditioned).
int negative_inertia_dense(const Mat& sym);
int negative_inertia_block_tridiagonal(const Mat& sym, int block);

// Index of the discretized form via the fast path.
int discretized_negative_count(const ActionProblem& p, int m);

// Invertibility bridge: the discretized form is singular exactly when t is
// conjugate (det Q2(t) = 0). Reports the two smallest witnesses.
struct InvertibilityReport {
  double min_abs_form_eigenvalue;
  double min_singular_value_q2;
  int mu_from_form;
  int mu_from_angles;
};
InvertibilityReport invertibility_bridge(const ActionProblem& p, int m,
                                         double h);

// Monotonicity of the sorted angles under an affine family
// S_mu = S(., mu) when J S' J <= 0 (equivalently [C' -B'; -B'^T A'] >= 0).
// The model's parameter part is the mu direction; n_left enters the frame
// as in morse_index.
struct FamilyMonotonicityReport {
  bool precondition_ok = true;
  double min_precondition_eig = 0.0;
  bool monotone = true;
  double worst_violation = 0.0;
};
FamilyMonotonicityReport angle_family_monotonicity(
    const CoefficientModel& model, const Mat& n_left, double t, double h,
    const std::vector<double>& mu_grid, double slack = 1e-9);

}  // namespace polarsturm
