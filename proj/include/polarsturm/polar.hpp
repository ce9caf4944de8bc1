#pragma once

// Matrix polar angles. A pair (Q2, Q1) forming the top row of a symplectic
// frame admits Q2 = r cos(phi), Q1 = r sin(phi) with det r != 0 and phi
// symmetric. The angle enters through the complex symmetric unitary
//
//   V = (Q2 - i Q1)^{-1} (Q2 + i Q1) = exp(2 i phi);
//
// Q2 Q2^T + Q1 Q1^T > 0 makes the inverse well defined. Re V and Im V are
// commuting real symmetric matrices, so one real orthogonal basis
// diagonalizes both, and the eigenvalues e^{i theta_j} of V carry the
// angles theta_j = 2 phi_j mod 2 pi.
//
// A continuous lift along a path assigns each node's raw angles to the
// running branches by minimal total displacement over candidates
// theta_k / 2 + m pi (Hungarian assignment, eigenvector overlap as a
// tiebreak), inserting midpoints whenever a step moves any branch more
// than a quarter turn. Crossing events are the parameters where a branch
// passes a level of the family offset + k pi: offset pi/2 marks det Q2 = 0
// (a conjugate instant), offset 0 marks zeros of sin phi.

#include <functional>
#include <vector>

#include "polarsturm/linalg.hpp"
#include "polarsturm/symplectic.hpp"

namespace polarsturm {

struct LagrangianPair {
  Mat q2, q1;
};

struct UnitaryReduction {
  Mat re_v, im_v;
  Mat omega;                 // joint eigenbasis, one column per angle
  Vec theta;                 // atan2(Im, Re) in (-pi, pi]
  double unitary_residual;   // ||V V^H - I||
  double symmetry_residual;  // ||V - V^T|| / max(1, ||V||)
  double commute_residual;   // ||[Re V, Im V]||
  double joint_off_diag;     // leftover off-diagonal after joint reduction
};

UnitaryReduction unitary_reduction(const LagrangianPair& pair);

// Radius factor of the polar splitting Q2 = r cos(phi), Q1 = r sin(phi):
// r = (Q2 + i Q1) e^{-i phi} is real with det r != 0. phi enters through
// its eigenpairs (omega columns, phi values); shifting any phi_j by pi
// only flips a column sign of r. imag_residual reports how far the
// computed product is from real, scaled by ||r||.
struct RealRadius {
  Mat r;
  double imag_residual;
};
RealRadius real_radius(const LagrangianPair& pair, const Mat& omega,
                       const Vec& phi);

// Half angles theta_j / 2 in (-pi/2, pi/2]: the canonical representative
// of each branch.
Vec raw_half_angles(const UnitaryReduction& red);

struct LiftOptions {
  double max_step = kPi / 4;     // largest accepted per-step displacement
  int max_depth = 48;            // refinement halvings before giving up
  double overlap_weight = 1e-6;  // eigenvector tiebreak in the assignment
  double event_tol = 1e-10;      // parameter tolerance for event location
  double boundary_tol = 1e-9;    // events this close to an end are flagged
  double init_tol = 1e-6;        // allowed mismatch of the initial values
};

struct CrossingEvent {
  double param;
  int branch;
  double level;    // offset + k * pi
  int direction;   // +1 if the branch was increasing through the level
  bool boundary;   // within boundary_tol of either end of the track
};

struct AngleTrack {
  int n = 0;
  std::vector<double> param;            // refined grid
  std::vector<Vec> phi;                 // lifted branch values per node
  std::vector<Mat> omega;               // eigenbasis per node, branch order
  std::vector<CrossingEvent> det_events;  // levels pi/2 + k pi
  std::vector<CrossingEvent> sin_events;  // levels k pi

  const Vec& end_phi() const { return phi.back(); }
  Vec sorted_end_phi() const;
};

using FrameFn = std::function<LagrangianPair(double)>;

// Continuous lift over [grid.front(), grid.back()] starting from phi0,
// which must match the raw angles at the first node modulo pi (checked to
// init_tol). Throws NumericError if refinement exhausts max_depth.
AngleTrack lift_angles(const FrameFn& source, const std::vector<double>& grid,
                       const Vec& phi0, const LiftOptions& opts = {});

// Crossing bookkeeping over (from, to); events within boundary_tol of
// either endpoint are tallied separately and excluded from the totals.
struct CrossingCount {
  int total = 0;
  int upward = 0;
  int downward = 0;
  int net = 0;
  int boundary = 0;
};
CrossingCount count_crossings(const std::vector<CrossingEvent>& events,
                              double from, double to,
                              double boundary_tol = 1e-9);

struct MonotonicityReport {
  bool ok = true;
  double worst_violation = 0.0;
  double at_param = 0.0;
  int branch = -1;
};
// direction +1 checks every branch is nondecreasing along the track
// (violations beyond slack are reported), -1 checks nonincreasing.
MonotonicityReport check_monotone(const AngleTrack& track, int direction,
                                  double slack = 1e-10);

std::vector<double> uniform_grid(double from, double to, int nodes);

// Continuous scalar lift xi with tan(xi) = k1 + k2 tan(tau) and
// xi(0) in (-pi/2, pi/2); for k2 > 0 it takes the value pi/2 + k pi at the
// poles of tan and is increasing through them.
double scalar_xi(double k1, double k2, double tau);
// zeta = pi/2 - xi, the companion lift with cot(zeta) = k1 + k2 tan(tau).
double scalar_zeta(double k1, double k2, double tau);
// Functional-calculus extension in the tau argument: s = W diag(s_j) W^T
// symmetric gives xi(k1, k2, s) = W diag(xi(k1, k2, s_j)) W^T.
Mat scalar_xi_matrix(double k1, double k2, const Mat& s);
Mat scalar_zeta_matrix(double k1, double k2, const Mat& s);

}  // namespace polarsturm
