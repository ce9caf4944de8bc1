#include "polarsturm/sensitivity.hpp"

#include <cmath>
#include <functional>

namespace polarsturm {

Mat SensitivityResult::c2(int k) const {
  const int n = static_cast<int>(m2[k].rows()) / 2;
  return m2[k].topRightCorner(n, n);
}

Mat SensitivityResult::s2(int k) const {
  const int n = static_cast<int>(m2[k].rows()) / 2;
  return standard_j(n) * m2[k];
}

double SensitivityResult::max_s2_symmetry_residual() const {
  double r = 0.0;
  for (size_t k = 0; k < m2.size(); ++k)
    r = std::max(r, symmetry_residual(s2(static_cast<int>(k))));
  return r;
}

namespace {

// Cumulative Simpson antiderivative of a matrix integrand sampled on the
// full flow grid; emits values on the even-index subgrid.
struct Cumulative {
  std::vector<double> tau;
  std::vector<Mat> value;
};

Cumulative cumulative_simpson(const std::vector<double>& grid, double h,
                              const std::function<Mat(int)>& integrand) {
  const int steps = static_cast<int>(grid.size()) - 1;
  Cumulative out;
  out.tau.reserve(steps / 2 + 1);
  out.value.reserve(steps / 2 + 1);
  Mat prev = integrand(0);
  Mat acc = Mat::Zero(prev.rows(), prev.cols());
  out.tau.push_back(grid[0]);
  out.value.push_back(acc);
  for (int k = 2; k <= steps; k += 2) {
    Mat mid = integrand(k - 1);
    Mat next = integrand(k);
    acc += (h / 3.0) * (prev + 4.0 * mid + next);
    out.tau.push_back(grid[k]);
    out.value.push_back(acc);
    prev = next;
  }
  return out;
}

// Shared core: frames(k) and their symplectic inverses on the full grid,
// G1 sampled per node, then M2 on the even subgrid.
SensitivityResult assemble(const std::vector<double>& grid, double h,
                           const std::function<Mat(int)>& frame,
                           const std::function<Mat(int)>& g1, const Mat& v) {
  const int steps = static_cast<int>(grid.size()) - 1;
  std::vector<Mat> inv(steps + 1);
  for (int k = 0; k <= steps; ++k) inv[k] = symplectic_inverse(frame(k));
  Cumulative kern = cumulative_simpson(
      grid, h, [&](int k) { return Mat(inv[k] * g1(k) * frame(k)); });
  SensitivityResult out;
  out.v = v;
  out.tau = kern.tau;
  out.m2.resize(kern.value.size());
  for (size_t j = 0; j < kern.value.size(); ++j) {
    int k = static_cast<int>(2 * j);
    out.m2[j] = v + frame(k) * kern.value[j] * inv[k];
  }
  return out;
}

}  // namespace

SensitivityResult lambda_sensitivity(const FlowSolution& flow,
                                     const Mat& phi0_prime) {
  const auto& grid = flow.grid();
  const auto& frames = flow.frames();
  const CoefficientModel& model = flow.model();
  const double lambda = flow.lambda();
  Mat v = phi0_prime;  // Phi(0) = I
  auto frame = [&](int k) { return frames[k]; };
  auto g1 = [&](int k) {
    Mat m1 = model.m(grid[k], lambda);
    return Mat(model.m_lambda(grid[k]) - v * m1 + m1 * v);
  };
  return assemble(grid, flow.step(), frame, g1, v);
}

SensitivityResult lambda_sensitivity_transformed(const FlowSolution& flow0,
                                                 const Mat& l1, const Mat& l2,
                                                 const Mat& l1_prime,
                                                 const Mat& l2_prime) {
  const auto& grid = flow0.grid();
  const auto& frames = flow0.frames();
  const CoefficientModel& model = flow0.model();
  const double lambda = flow0.lambda();
  Mat l1_inv = guarded_inverse(l1, "left boundary transform");
  Mat phi0_inv = guarded_inverse(Mat(l1 * l2), "initial frame");
  Mat v = (l1_prime * l2 + l1 * l2_prime) * phi0_inv;
  auto frame = [&](int k) { return Mat(l1 * frames[k] * l2); };
  auto g1 = [&](int k) {
    Mat m1 = l1 * model.m(grid[k], lambda) * l1_inv;
    Mat m1p = l1 * model.m_lambda(grid[k]) * l1_inv;
    return Mat(m1p - v * m1 + m1 * v);
  };
  return assemble(grid, flow0.step(), frame, g1, v);
}

SensitivityResult lambda_sensitivity_conjugated(const FlowSolution& flow0,
                                                const Mat& l1, const Mat& l2,
                                                const Mat& l2_prime) {
  const auto& grid = flow0.grid();
  const auto& frames = flow0.frames();
  const CoefficientModel& model = flow0.model();
  const double lambda = flow0.lambda();
  Mat l1_inv = guarded_inverse(l1, "left boundary transform");
  Mat d = l2_prime * guarded_inverse(l2, "right boundary transform");
  Mat v = l1 * d * l1_inv;
  auto frame0 = [&](int k) { return frames[k]; };
  auto g4 = [&](int k) {
    Mat m0 = model.m(grid[k], lambda);
    return Mat(model.m_lambda(grid[k]) + m0 * d - d * m0);
  };
  SensitivityResult base = assemble(grid, flow0.step(), frame0, g4,
                                    Mat::Zero(v.rows(), v.cols()));
  SensitivityResult out;
  out.v = v;
  out.tau = base.tau;
  out.m2.resize(base.m2.size());
  for (size_t j = 0; j < base.m2.size(); ++j)
    out.m2[j] = v + l1 * base.m2[j] * l1_inv;
  return out;
}

SensitivityResult lambda_sensitivity_starred(const FlowSolution& flow0,
                                             const Mat& l1, const Mat& l2,
                                             const Mat& l2_prime) {
  SensitivityResult base =
      lambda_sensitivity(flow0, Mat::Zero(l1.rows(), l1.cols()));
  Mat l2_inv = guarded_inverse(l2, "right boundary transform");
  const auto& frames = flow0.frames();
  SensitivityResult out;
  out.tau = base.tau;
  out.m2.resize(base.m2.size());
  for (size_t j = 0; j < base.m2.size(); ++j) {
    Mat xzwy = l1 * frames[2 * j].transpose();
    Mat xzwy_inv = symplectic_inverse(xzwy);
    Mat phi = xzwy * l2;
    out.m2[j] = xzwy * base.m2[j].transpose() * xzwy_inv +
                phi * l2_inv * l2_prime * symplectic_inverse(phi);
  }
  out.v = out.m2.front();
  return out;
}

BoundaryFamilySensitivity c2_boundary_family(const FlowSolution& flow0,
                                             const Mat& alpha0,
                                             const Mat& beta0,
                                             const Mat& delta_diff) {
  const auto& grid = flow0.grid();
  const auto& frames = flow0.frames();
  const CoefficientModel& model = flow0.model();
  const int n = flow0.n();
  auto xz = [&](int k) {
    SymplecticFrame f = SymplecticFrame::from_matrix(frames[k]);
    // Top row of L1 Phi0^T: X = a0 Qc^T - b0 Qs^T, Z = a0 Pc^T - b0 Ps^T.
    Mat x = alpha0 * f.q2.transpose() - beta0 * f.q1.transpose();
    Mat z = alpha0 * f.p2.transpose() - beta0 * f.p1.transpose();
    return std::pair<Mat, Mat>(x, z);
  };
  auto integrand = [&](int k) {
    auto [x, z] = xz(k);
    Mat ap = model.a_lin.eval(grid[k]);
    Mat bp = model.b_lin.eval(grid[k]);
    Mat cp = model.c_lin.eval(grid[k]);
    return Mat(z * cp * z.transpose() + x * ap * x.transpose() +
               x * bp.transpose() * z.transpose() +
               z * bp * x.transpose());
  };
  Cumulative integral = cumulative_simpson(grid, flow0.step(), integrand);
  BoundaryFamilySensitivity out;
  out.tau = integral.tau;
  out.c2.resize(integral.value.size(), Mat::Zero(n, n));
  for (size_t j = 0; j < integral.value.size(); ++j) {
    auto [x, z] = xz(static_cast<int>(2 * j));
    Mat q1 = -x;
    (void)z;
    out.c2[j] = q1 * delta_diff * q1.transpose() - integral.value[j];
  }
  return out;
}

}  // namespace polarsturm
