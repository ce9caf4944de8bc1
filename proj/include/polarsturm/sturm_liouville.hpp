#pragma once

// Matrix Sturm-Liouville eigenvalue problems
//
//   (C0^{-1} q')' + (-D + lambda E) q = 0,   C0 > 0, E > 0, D symmetric,
//
// with separated self-adjoint boundary conditions written for the momentum
// p = C0^{-1} q':
//
//   beta0 q(0) + alpha0 p(0) = 0,     delta1 q(t) + gamma1 p(t) = 0,
//
// where alpha0 beta0^T is symmetric, alpha0 alpha0^T + beta0 beta0^T > 0,
// gamma1 delta1^T is symmetric and gamma1 is invertible. After scaling the
// left pair so alpha0 alpha0^T + beta0 beta0^T = I and setting
// delta = gamma1^{-1} delta1 (symmetric), the boundary data enter through
//
//   L1 = [alpha0 -beta0; beta0 alpha0],   L2 = [delta -I; I 0],
//
// and the frame family Phi(tau) = L1 Phi0(tau)^T L2 built on the transpose
// of the fundamental flow. Its top row (Q2, Q1) = (X delta + Z, -X) with
// [X Z] the top row of L1 Phi0^T encodes both conditions at once: columns
// of [Q1^T; -Z^T] solve the system and satisfy the left condition, and
// lambda is an eigenvalue exactly when det Q2(t, lambda) = 0, that is when
// some polar angle phi_j(t, lambda) is an odd multiple of pi/2.
//
// The angles phi_j(t, .) decrease strictly in lambda, flatten to limits
// l_j pi as lambda -> -infinity, and run to -infinity as lambda -> +infinity,
// so the j-th branch meets the level (l_j - k - 1/2) pi exactly once; that
// crossing is the k-th eigenvalue on the branch, and the matching
// eigenfunction component sin phi_j vanishes exactly k times inside (0, t).

#include <map>
#include <memory>
#include <vector>

#include "polarsturm/flow.hpp"
#include "polarsturm/polar.hpp"
#include "polarsturm/sensitivity.hpp"

namespace polarsturm {

struct SLProblem {
  CoeffFn c0;   // C0(tau) > 0
  CoeffFn d;    // D(tau) symmetric
  CoeffFn e;    // E(tau) > 0
  Mat alpha0, beta0;   // left condition on (q(0), p(0))
  Mat gamma1, delta1;  // right condition on (q(t), p(t))
  double t = 0.0;
};

struct NormalizedSL {
  int n = 0;
  double t = 0.0;
  Mat alpha0, beta0;       // alpha0 alpha0^T + beta0 beta0^T = I
  Mat delta;               // gamma1^{-1} delta1, symmetric
  CoefficientModel model;  // A = -D + lambda E, B = 0, C = C0

  Mat l1() const;  // [alpha0 -beta0; beta0 alpha0], orthogonal symplectic
  Mat l2() const;  // [delta -I; I 0]
};

// Validates the admissibility requirements and rescales the left pair.
NormalizedSL normalize_sl(const SLProblem& p);

// Top row (Q2, Q1) of L1 Phi0(tau)^T L2 from a fundamental flow.
LagrangianPair sl_pair(const SymplecticFrame& base, const Mat& alpha0,
                       const Mat& beta0, const Mat& delta);

struct BranchLimits {
  double lambda_min = 0.0;   // where the limits were read off
  std::vector<int> l;        // branch limits l_j, ascending
  Vec end_phi;               // sorted angles phi(t, lambda_min)
  double quotient_norm = 0;  // ||Q2(t)^{-1} Q1(t)|| at lambda_min
  int doublings = 0;
};

struct SLEigenvalue {
  double lambda = 0.0;
  int branch = 0;             // index into the ascending branch limits
  int k = 0;                  // eigenvalue number on the branch
  double target = 0.0;        // (l_j - k - 1/2) pi
  double end_angle_residual = 0.0;
  int zero_count = 0;         // zeros of sin phi_j inside (0, t)
};

struct SLEigenfunction {
  SLEigenvalue eig;
  std::vector<double> tau;
  std::vector<Vec> q, p;       // p = C0^{-1} q'
  Vec c;                       // kernel coefficients, E-normalized
  double kernel_residual = 0.0;    // ||Q2(t)^T c|| / ||c||
  double left_bc_residual = 0.0;   // ||beta0 q(0) + alpha0 p(0)||
  double right_bc_residual = 0.0;  // ||delta q(t) + p(t)||
  double realness_residual = 0.0;  // imaginary leftover in r(t)
};

class SLSolver {
 public:
  SLSolver(NormalizedSL sl, double h, int grid_nodes = 0,
           LiftOptions opts = {});

  const NormalizedSL& problem() const { return sl_; }
  const Vec& phi0() const { return phi0_; }

  std::shared_ptr<const FlowSolution> flow(double lambda);
  std::shared_ptr<const AngleTrack> track(double lambda);
  FrameFn frame_fn(double lambda);

  // Sorted angles phi(t, lambda), one evaluation of the surface at the
  // right end; strictly decreasing in lambda, branch by branch.
  Vec end_angles(double lambda);
  std::vector<Vec> lambda_surface(const std::vector<double>& lambdas);

  // ||Q2(t)^{-1} Q1(t)||, the tangent-size measure that flattens to zero
  // as lambda -> -infinity.
  double quotient_norm(double lambda);

  // Doubles lambda downward from lambda_start until the quotient norm
  // drops below threshold, then reads the branch limits by rounding
  // phi_j(t, lambda_min) / pi.
  BranchLimits estimate_branch_limits(double lambda_start = -1.0,
                                      double threshold = 0.05,
                                      int max_doublings = 20);

  SLEigenvalue solve_branch(const BranchLimits& bl, int branch, int k);
  // First count eigenvalues in ascending order (branches merged).
  std::vector<SLEigenvalue> solve_first(int count);

  SLEigenfunction eigenfunction(const SLEigenvalue& eig,
                                int output_nodes = 0);

  // Parameter sensitivity of the angle mechanism: the symmetric matrix
  // C2(tau) = -int_0^tau X E X^T dsigma on the even flow subgrid.
  BoundaryFamilySensitivity c2_quadrature(double lambda);

  double bisection_tol = 1e-10;  // relative in lambda

 private:
  struct CacheEntry {
    std::shared_ptr<const FlowSolution> flow;
    std::shared_ptr<const AngleTrack> track;
  };
  CacheEntry& entry(double lambda);

  NormalizedSL sl_;
  double h_;
  int grid_nodes_;
  LiftOptions opts_;
  Vec phi0_;
  std::map<double, CacheEntry> cache_;
};

}  // namespace polarsturm
