#include "polarsturm/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polarsturm {

void ActionProblem::validate() const {
  if (t <= 0.0) throw ConfigError("action problem needs t > 0");
  if (!is_symmetric(n_left, 1e-9))
    throw ConfigError("boundary matrix N must be symmetric");
  model.validate(t);
  // The index theory needs C(tau) > 0 on [0, t].
  for (int i = 0; i <= 16; ++i) {
    double tau = t * i / 16.0;
    if (eigh(model.c(tau, 0.0)).values.minCoeff() <= 0.0)
      throw ConfigError("C(tau) must be positive definite on [0, t]");
  }
}

FrameFn morse_frame_fn(const FlowSolution& flow, const Mat& n_left) {
  return [&flow, n_left](double tau) {
    SymplecticFrame f = SymplecticFrame::from_matrix(flow.at(tau));
    return LagrangianPair{f.q2 + f.q1 * n_left, f.q1};
  };
}

MorseResult morse_index(const ActionProblem& p, double h, int grid_nodes,
                        const LiftOptions& opts) {
  p.validate();
  const int n = p.model.n;
  if (grid_nodes <= 1)
    grid_nodes = std::max(65, static_cast<int>(p.t * 40) | 1);
  FlowSolution flow = integrate_fundamental(p.model, 0.0, p.t, h);
  FrameFn source = morse_frame_fn(flow, p.n_left);
  MorseResult out;
  out.track = lift_angles(source, uniform_grid(0.0, p.t, grid_nodes),
                          Vec::Zero(n), opts);
  out.phi_end = out.track.end_phi();
  out.mu_j.resize(n);
  out.min_margin = kPi;
  for (int j = 0; j < n; ++j) {
    out.mu_j[j] = static_cast<int>(std::lround(out.phi_end(j) / kPi));
    out.mu += out.mu_j[j];
    double margin = kPi / 2 - std::abs(out.phi_end(j) - out.mu_j[j] * kPi);
    out.min_margin = std::min(out.min_margin, margin);
  }
  if (out.min_margin < 1e-9)
    throw NumericError(
        "endpoint is conjugate to within tolerance; the index is not "
        "well defined (margin " +
        format_double(out.min_margin) + ")");
  return out;
}

Mat discretized_action_form(const ActionProblem& p, int m) {
  p.validate();
  const int n = p.model.n;
  if (m < 2) throw ConfigError("discretization needs at least 2 intervals");
  const double h = p.t / m;
  const int dim = n * m;  // nodes 0 .. m-1; node m is clamped
  Mat k = Mat::Zero(dim, dim);
  k.topLeftCorner(n, n) += p.n_left;
  for (int i = 0; i < m; ++i) {
    double mid = (i + 0.5) * h;
    Mat c = p.model.c(mid, 0.0);
    Mat b = p.model.b(mid, 0.0);
    Mat a = p.model.a(mid, 0.0);
    Mat cinv = guarded_inverse(c, "C(tau) in the action form");
    Mat cb = cinv * b;
    Mat curv = a - b.transpose() * cb;  // A - B^T C^{-1} B
    // Local contributions over nodes (i, i+1): hat slopes are -1/h, +1/h
    // and midpoint values 1/2, 1/2; node m stays clamped.
    auto add = [&](int a_node, int b_node, const Mat& val) {
      if (a_node >= m || b_node >= m) return;
      k.block(a_node * n, b_node * n, n, n) += val;
    };
    // gradient term
    add(i, i, cinv / h);
    add(i + 1, i + 1, cinv / h);
    add(i, i + 1, -cinv / h);
    add(i + 1, i, -cinv / h);
    // cross terms: -(g1' , C^{-1}B g2) - (g2', C^{-1}B g1) with midpoint
    // quadrature: -(1/2)(d1)^T CB (s2) - (1/2)(d2)^T CB (s1) where
    // d = g_{i+1} - g_i and s = g_i + g_{i+1}.
    Mat half_cb = 0.5 * cb;
    // (d1)^T CB (s2) expands over the four node pairs:
    add(i, i, half_cb + half_cb.transpose());
    add(i, i + 1, half_cb - half_cb.transpose());
    add(i + 1, i, -half_cb + half_cb.transpose());
    add(i + 1, i + 1, -half_cb - half_cb.transpose());
    // potential term: -h (mid1, curv mid2) = -(h/4)(s1, curv s2)
    Mat quarter = -(h / 4.0) * curv;
    add(i, i, quarter);
    add(i, i + 1, quarter);
    add(i + 1, i, quarter);
    add(i + 1, i + 1, quarter);
  }
  return symmetrize(k);
}

int negative_inertia_dense(const Mat& sym) {
  EigH e = eigh(sym);
  double scale = std::max(std::abs(e.values(0)),
                          std::abs(e.values(e.values.size() - 1)));
  int count = 0;
  for (int i = 0; i < e.values.size(); ++i)
    if (e.values(i) < -1e-12 * std::max(1.0, scale)) ++count;
  return count;
}

int negative_inertia_block_tridiagonal(const Mat& sym, int block) {
  const int dim = static_cast<int>(sym.rows());
  if (dim % block != 0)
    throw ConfigError("matrix dimension is not a multiple of the block size");
  const int m = dim / block;
  // Congruence S_i = K_ii - B_{i-1}^T S_{i-1}^{-1} B_{i-1} preserves
  // inertia block by block (Haynsworth); fall back to the dense count if a
  // pivot block is close to singular.
  Mat s = sym.topLeftCorner(block, block);
  int count = 0;
  for (int i = 0;; ++i) {
    EigH e = eigh(s);
    double scale = e.values.cwiseAbs().maxCoeff();
    if (e.values.cwiseAbs().minCoeff() <= 1e-10 * std::max(1.0, scale))
      return negative_inertia_dense(sym);
    for (int j = 0; j < e.values.size(); ++j)
      if (e.values(j) < 0.0) ++count;
    if (i + 1 >= m) break;
    Mat off = sym.block(i * block, (i + 1) * block, block, block);
    Mat next = sym.block((i + 1) * block, (i + 1) * block, block, block);
    s = next - off.transpose() *
                   e.vectors * e.values.cwiseInverse().asDiagonal() *
                   e.vectors.transpose() * off;
  }
  return count;
}

int discretized_negative_count(const ActionProblem& p, int m) {
  Mat k = discretized_action_form(p, m);
  return negative_inertia_block_tridiagonal(k, p.model.n);
}

InvertibilityReport invertibility_bridge(const ActionProblem& p, int m,
                                         double h) {
  InvertibilityReport rep{};
  Mat k = discretized_action_form(p, m);
  EigH e = eigh(k);
  rep.min_abs_form_eigenvalue = e.values.cwiseAbs().minCoeff();
  rep.mu_from_form = negative_inertia_dense(k);
  MorseResult mr = morse_index(p, h);
  rep.mu_from_angles = mr.mu;
  FlowSolution flow = integrate_fundamental(p.model, 0.0, p.t, h);
  LagrangianPair pair = morse_frame_fn(flow, p.n_left)(p.t);
  Eigen::JacobiSVD<Mat> svd(pair.q2);
  rep.min_singular_value_q2 = svd.singularValues().minCoeff();
  return rep;
}

FamilyMonotonicityReport angle_family_monotonicity(
    const CoefficientModel& model, const Mat& n_left, double t, double h,
    const std::vector<double>& mu_grid, double slack) {
  FamilyMonotonicityReport rep;
  const int n = model.n;
  // Precondition: [C' -B'; -B'^T A'] >= 0 wherever sampled, which is
  // J S' J <= 0 rearranged.
  rep.min_precondition_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 16; ++i) {
    double tau = t * i / 16.0;
    Mat p(2 * n, 2 * n);
    p.topLeftCorner(n, n) = model.c_lin.eval(tau);
    p.topRightCorner(n, n) = -model.b_lin.eval(tau).transpose();
    p.bottomLeftCorner(n, n) = -model.b_lin.eval(tau);
    p.bottomRightCorner(n, n) = model.a_lin.eval(tau);
    double lo = eigh(p).values.minCoeff();
    rep.min_precondition_eig = std::min(rep.min_precondition_eig, lo);
  }
  if (rep.min_precondition_eig < -1e-10) rep.precondition_ok = false;

  // Sorted angle tuples at the quarter points of [0, t] must be pointwise
  // nondecreasing along the parameter grid.
  const std::vector<double> grid = uniform_grid(0.0, t, 257);
  const std::vector<double> sample_times = {t / 4, t / 2, 3 * t / 4, t};
  std::vector<std::vector<Vec>> tuples;  // per mu, per sample time
  for (double mu : mu_grid) {
    FlowSolution flow = integrate_fundamental(model, mu, t, h);
    AngleTrack track =
        lift_angles(morse_frame_fn(flow, n_left), grid, Vec::Zero(n));
    std::vector<Vec> at_samples;
    for (double s : sample_times) {
      size_t best = 0;
      for (size_t k = 1; k < track.param.size(); ++k)
        if (std::abs(track.param[k] - s) < std::abs(track.param[best] - s))
          best = k;
      Vec v = track.phi[best];
      std::sort(v.data(), v.data() + v.size());
      at_samples.push_back(v);
    }
    tuples.push_back(std::move(at_samples));
  }
  for (size_t i = 0; i + 1 < tuples.size(); ++i) {
    for (size_t s = 0; s < sample_times.size(); ++s) {
      for (int j = 0; j < n; ++j) {
        double d = tuples[i + 1][s](j) - tuples[i][s](j);
        if (d < -slack) {
          rep.monotone = false;
          rep.worst_violation = std::max(rep.worst_violation, -d);
        }
      }
    }
  }
  return rep;
}

}  // namespace polarsturm
