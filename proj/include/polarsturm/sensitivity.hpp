#pragma once

// Derivative of a frame family with respect to the parameter. With
// M1 = dPhi/dtau Phi^{-1} and M2 = dPhi/dlambda Phi^{-1}, the variation of
// parameters formula gives
//
//   M2(tau) = V + int_0^tau F(tau,s) G1(s) F(tau,s)^{-1} ds,
//   G1 = dM1/dlambda - V M1 + M1 V,   V = (dPhi/dlambda)(0) Phi(0)^{-1},
//
// with F(tau,s) = Phi(tau) Phi(s)^{-1}. Factoring the propagator as
// Phi(tau) [Phi^{-1}(s) G1(s) Phi(s)] Phi^{-1}(tau) turns the integral into
// one cumulative Simpson pass over the flow grid.
//
// J M2 is symmetric (the parameter derivative of a symplectic path), and
// its bottom-right block C2 = top-right block of M2 drives all the angle
// monotonicity statements.

#include <vector>

#include "polarsturm/flow.hpp"

namespace polarsturm {

struct SensitivityResult {
  std::vector<double> tau;  // even-index subgrid of the flow grid
  std::vector<Mat> m2;      // M2 at those times, 2n x 2n
  Mat v;                    // M2(0)
  // Convenience views of S2 = J M2 at each time.
  Mat c2(int k) const;      // top-right block of m2[k]
  Mat s2(int k) const;
  double max_s2_symmetry_residual() const;
};

// Fundamental flow Phi(0) = I; phi0_prime is the parameter derivative of
// the initial frame (zero for a parameter-independent start).
SensitivityResult lambda_sensitivity(const FlowSolution& flow,
                                     const Mat& phi0_prime);

// Family Phi = L1 Phi0 L2 with constant-in-tau transforms; l1_prime and
// l2_prime are their parameter derivatives.
SensitivityResult lambda_sensitivity_transformed(const FlowSolution& flow0,
                                                 const Mat& l1, const Mat& l2,
                                                 const Mat& l1_prime,
                                                 const Mat& l2_prime);

// Same family with constant L1, computed by conjugating the base flow
// instead of transforming the frames:
//   M2 = V + L1 Phi0(tau) [int Phi0^{-1} G4 Phi0 ds] Phi0^{-1}(tau) L1^{-1},
//   G4 = dM0/dlambda + M0 D - D M0,   D = l2_prime l2^{-1},
//   V = L1 D L1^{-1}.
// An independent code path used to cross-check the transformed route.
SensitivityResult lambda_sensitivity_conjugated(const FlowSolution& flow0,
                                                const Mat& l1, const Mat& l2,
                                                const Mat& l2_prime);

// Family Phi = L1 Phi0^T L2 built on the transposed base flow (constant
// L1; L2 may carry the parameter). With [X Z; W Y] = L1 Phi0^T,
//
//   M2 = [X Z; W Y] M2_0^T [X Z; W Y]^{-1} + Phi L2^{-1} l2_prime Phi^{-1},
//
// where M2_0 is the fundamental flow's own sensitivity.
SensitivityResult lambda_sensitivity_starred(const FlowSolution& flow0,
                                             const Mat& l1, const Mat& l2,
                                             const Mat& l2_prime);

// C2 for the boundary-template family Phi = L1 Phi0^T L2(mu) with
// L1 = [a0 -b0; b0 a0], L2 = [delta_mu -I; I 0] and the model's own affine
// parameter part. Writing [X Z; W Y] = L1 Phi0^T(s),
//
//   C2(tau) = Q1 (d/dmu delta) Q1^T
//             - int_0^tau (Z C' Z^T + X A' X^T + X B'^T Z^T + Z B' X^T) ds,
//
// where Q1(tau) = -X(tau) and (A', B', C') are the parameter parts of the
// model blocks. Returned on the even-index subgrid.
struct BoundaryFamilySensitivity {
  std::vector<double> tau;
  std::vector<Mat> c2;
};
BoundaryFamilySensitivity c2_boundary_family(const FlowSolution& flow0,
                                             const Mat& alpha0,
                                             const Mat& beta0,
                                             const Mat& delta_diff);

}  // namespace polarsturm
