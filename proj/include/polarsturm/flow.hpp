#pragma once

// Fundamental solution of Phi' = M(tau, lambda) Phi from Phi(0) = I by
// classical RK4 on a fixed grid. After every step the frame is pulled back
// toward the symplectic group by the first-order corrector
//
//   Phi <- Phi (I + J E / 2),   E = Phi^T J Phi - J,
//
// which cancels the defect E to leading order (E is antisymmetric, so
// X = J E / 2 satisfies X^T J + J X = -E). Between nodes the solution is
// a cubic Hermite interpolant, re-projected the same way, so dense output
// stays symplectic to roundoff.

#include <memory>
#include <vector>

#include "polarsturm/model.hpp"
#include "polarsturm/symplectic.hpp"

namespace polarsturm {

struct FlowOptions {
  bool reproject = true;
  // Integration aborts if the per-node symplectic residual exceeds this.
  double residual_abort = 1e-6;
};

class FlowSolution {
 public:
  FlowSolution(CoefficientModel model, double lambda, double t, int steps,
               FlowOptions opts);

  int n() const { return model_.n; }
  double lambda() const { return lambda_; }
  double t() const { return t_; }
  double step() const { return h_; }
  int steps() const { return static_cast<int>(tau_.size()) - 1; }
  const std::vector<double>& grid() const { return tau_; }
  const std::vector<Mat>& frames() const { return phi_; }
  double max_residual() const { return max_residual_; }
  const CoefficientModel& model() const { return model_; }

  // Dense evaluation; exact at grid nodes.
  Mat at(double tau) const;
  // M(tau) * Phi(tau).
  Mat derivative(double tau) const;
  // F(tau, sigma) = Phi(tau) Phi(sigma)^{-1}.
  Mat propagator(double tau, double sigma) const;

 private:
  friend FlowSolution integrate_fundamental(const CoefficientModel&, double,
                                            double, double,
                                            const FlowOptions&);
  CoefficientModel model_;
  double lambda_;
  double t_;
  double h_;
  FlowOptions opts_;
  std::vector<double> tau_;
  std::vector<Mat> phi_;
  double max_residual_ = 0.0;
};

// steps = t / h rounded to the nearest even count (Simpson-ready grid);
// the realized step is stored in the result.
FlowSolution integrate_fundamental(const CoefficientModel& model,
                                   double lambda, double t, double h,
                                   const FlowOptions& opts = {});

Mat reproject_symplectic(const Mat& phi);

}  // namespace polarsturm
