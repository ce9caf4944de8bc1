#include "polarsturm/flow.hpp"

#include <algorithm>
#include <cmath>

namespace polarsturm {

Mat reproject_symplectic(const Mat& phi) {
  const int n = static_cast<int>(phi.rows()) / 2;
  Mat j = standard_j(n);
  Mat e = phi.transpose() * j * phi - j;
  // The first-order correction phi (I + J E / 2) only helps while the
  // absolute defect is small; on frames with huge entries the relative
  // residual can be fine while E itself is large, and applying the
  // correction there would wreck the frame.
  if (e.norm() > 0.1) return phi;
  return phi * (Mat::Identity(2 * n, 2 * n) + 0.5 * j * e);
}

FlowSolution::FlowSolution(CoefficientModel model, double lambda, double t,
                           int steps, FlowOptions opts)
    : model_(std::move(model)), lambda_(lambda), t_(t), opts_(opts) {
  if (t <= 0.0) throw ConfigError("integration time must be positive");
  h_ = t / steps;
  tau_.resize(steps + 1);
  phi_.reserve(steps + 1);
  const int d = 2 * model_.n;
  Mat phi = Mat::Identity(d, d);
  tau_[0] = 0.0;
  phi_.push_back(phi);
  for (int i = 0; i < steps; ++i) {
    double tau = i * h_;
    Mat k1 = model_.m(tau, lambda_) * phi;
    Mat k2 = model_.m(tau + 0.5 * h_, lambda_) * (phi + 0.5 * h_ * k1);
    Mat k3 = model_.m(tau + 0.5 * h_, lambda_) * (phi + 0.5 * h_ * k2);
    Mat k4 = model_.m(tau + h_, lambda_) * (phi + h_ * k3);
    phi += (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!phi.allFinite())
      throw NumericError("flow overflowed at tau " + format_double(tau + h_));
    if (opts_.reproject) phi = reproject_symplectic(phi);
    double res = symplectic_residual(phi);
    max_residual_ = std::max(max_residual_, res);
    if (res > opts_.residual_abort)
      throw NumericError("flow lost symplecticity: residual " +
                         format_double(res) + " at tau " +
                         format_double(tau + h_));
    tau_[i + 1] = (i + 1 == steps) ? t : (i + 1) * h_;
    phi_.push_back(phi);
  }
}

FlowSolution integrate_fundamental(const CoefficientModel& model,
                                   double lambda, double t, double h,
                                   const FlowOptions& opts) {
  if (h <= 0.0) throw ConfigError("step size must be positive");
  model.validate(t);
  long steps = std::lround(t / h);
  if (steps < 2) steps = 2;
  if (steps % 2 != 0) ++steps;
  return FlowSolution(model, lambda, t, static_cast<int>(steps), opts);
}

Mat FlowSolution::at(double tau) const {
  const int last = steps();
  if (tau <= 0.0) return phi_.front();
  if (tau >= t_) return phi_.back();
  double pos = tau / h_;
  int i = std::min(static_cast<int>(pos), last - 1);
  double s = pos - i;
  if (s < 1e-12) return phi_[i];
  if (1.0 - s < 1e-12) return phi_[i + 1];
  // Cubic Hermite with the ODE's own derivatives at the nodes.
  Mat f0 = model_.m(tau_[i], lambda_) * phi_[i];
  Mat f1 = model_.m(tau_[i + 1], lambda_) * phi_[i + 1];
  double s2 = s * s, s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1;
  double h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2;
  double h11 = s3 - s2;
  Mat out = h00 * phi_[i] + (h10 * h_) * f0 + h01 * phi_[i + 1] +
            (h11 * h_) * f1;
  if (opts_.reproject) out = reproject_symplectic(out);
  return out;
}

Mat FlowSolution::derivative(double tau) const {
  return model_.m(tau, lambda_) * at(tau);
}

Mat FlowSolution::propagator(double tau, double sigma) const {
  return at(tau) * symplectic_inverse(at(sigma));
}

}  // namespace polarsturm
