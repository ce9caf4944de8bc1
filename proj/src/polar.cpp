#include "polarsturm/polar.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>

namespace polarsturm {

using CMat = Eigen::MatrixXcd;

UnitaryReduction unitary_reduction(const LagrangianPair& pair) {
  const int n = static_cast<int>(pair.q2.rows());
  const std::complex<double> i01(0.0, 1.0);
  // V is unchanged by any invertible left factor on (Q2, Q1), so the rows
  // of [Q2 Q1] can be scaled to unit norm first. That keeps the solve well
  // conditioned when the frame has grown huge (no row can vanish because
  // Q2 Q2^T + Q1 Q1^T > 0).
  Mat q2 = pair.q2, q1 = pair.q1;
  for (int r = 0; r < n; ++r) {
    double s = std::hypot(q2.row(r).norm(), q1.row(r).norm());
    if (s > 0.0) {
      q2.row(r) /= s;
      q1.row(r) /= s;
    }
  }
  CMat minus = q2.cast<std::complex<double>>() -
               i01 * q1.cast<std::complex<double>>();
  CMat plus = q2.cast<std::complex<double>>() +
              i01 * q1.cast<std::complex<double>>();
  // (Q2 - iQ1)(Q2 + iQ1)^H = Q2 Q2^T + Q1 Q1^T > 0, so the inverse exists
  // for any frame top row; the guard catches numerically ruined inputs.
  Eigen::JacobiSVD<CMat> svd(minus);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > kCondGuard)
    throw NumericError("unitary_reduction: Q2 - iQ1 too ill-conditioned");
  CMat v = minus.partialPivLu().solve(plus);

  UnitaryReduction red;
  red.re_v = v.real();
  red.im_v = v.imag();
  red.unitary_residual =
      (v * v.adjoint() - CMat::Identity(n, n)).norm();
  red.symmetry_residual =
      (v - v.transpose()).norm() / std::max(1.0, v.norm());
  red.commute_residual =
      (red.re_v * red.im_v - red.im_v * red.re_v).norm();
  JointDiag jd = joint_diagonalize(symmetrize(red.re_v), symmetrize(red.im_v));
  red.omega = jd.omega;
  red.joint_off_diag = jd.off_diag;
  red.theta = Vec(n);
  for (int j = 0; j < n; ++j) {
    red.theta(j) = std::atan2(jd.y(j), jd.x(j));
    // atan2 returns -pi at the branch seam; fold to the (-pi, pi] side.
    if (red.theta(j) <= -kPi + 1e-300) red.theta(j) = kPi;
  }
  return red;
}

Vec raw_half_angles(const UnitaryReduction& red) {
  Vec h = red.theta / 2.0;
  for (int j = 0; j < h.size(); ++j)
    if (h(j) <= -kPi / 2) h(j) += kPi;
  return h;
}

RealRadius real_radius(const LagrangianPair& pair, const Mat& omega,
                       const Vec& phi) {
  const int n = static_cast<int>(pair.q2.rows());
  const std::complex<double> i01(0.0, 1.0);
  CMat plus = pair.q2.cast<std::complex<double>>() +
              i01 * pair.q1.cast<std::complex<double>>();
  CMat rot = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    rot += std::exp(-i01 * phi(j)) * (omega.col(j) * omega.col(j).transpose())
               .cast<std::complex<double>>();
  CMat prod = plus * rot;
  RealRadius out;
  out.r = prod.real();
  out.imag_residual = prod.imag().norm() / std::max(1.0, out.r.norm());
  return out;
}

Vec AngleTrack::sorted_end_phi() const {
  Vec v = phi.back();
  std::sort(v.data(), v.data() + v.size());
  return v;
}

std::vector<double> uniform_grid(double from, double to, int nodes) {
  if (nodes < 2) throw ConfigError("grid needs at least two nodes");
  std::vector<double> g(nodes);
  for (int i = 0; i < nodes; ++i)
    g[i] = from + (to - from) * i / (nodes - 1);
  g.back() = to;
  return g;
}

namespace {

struct MatchResult {
  Vec phi;        // matched lifted values, branch order
  Mat omega;      // eigenvectors aligned to branches
  double worst;   // largest single-branch displacement
};

// Assign the reduction's raw angles to the reference branches. Candidates
// for branch j from raw angle k are theta_k/2 + m pi with m chosen nearest
// to ref(j); the assignment minimizes displacement with a small
// eigenvector-overlap tiebreak.
MatchResult match_branches(const UnitaryReduction& red, const Vec& ref,
                           const Mat* omega_ref, double overlap_weight) {
  const int n = static_cast<int>(ref.size());
  Mat cand(n, n), disp(n, n), cost(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double half = red.theta(k) / 2.0;
      double m = std::round((ref(j) - half) / kPi);
      cand(j, k) = half + m * kPi;
      disp(j, k) = std::abs(ref(j) - cand(j, k));
      double tie = 0.0;
      if (omega_ref != nullptr) {
        double overlap =
            std::abs(omega_ref->col(j).dot(red.omega.col(k)));
        tie = overlap_weight * (1.0 - overlap);
      }
      cost(j, k) = disp(j, k) + tie;
    }
  }
  std::vector<int> assign = min_cost_assignment(cost);
  MatchResult out;
  out.phi = Vec(n);
  out.omega = Mat(n, n);
  out.worst = 0.0;
  for (int j = 0; j < n; ++j) {
    int k = assign[j];
    out.phi(j) = cand(j, k);
    Vec col = red.omega.col(k);
    if (omega_ref != nullptr && omega_ref->col(j).dot(col) < 0.0) col = -col;
    out.omega.col(j) = col;
    out.worst = std::max(out.worst, disp(j, k));
  }
  return out;
}

class LiftEngine {
 public:
  LiftEngine(const FrameFn& src, const LiftOptions& opts)
      : src_(src), opts_(opts) {}

  AngleTrack run(const std::vector<double>& grid, const Vec& phi0) {
    if (grid.size() < 2) throw ConfigError("lift grid needs two nodes");
    UnitaryReduction first = unitary_reduction(src_(grid.front()));
    const int n = static_cast<int>(first.theta.size());
    if (phi0.size() != n)
      throw ConfigError("initial angle vector has wrong length");
    MatchResult init = match_branches(first, phi0, nullptr, 0.0);
    if (init.worst > opts_.init_tol)
      throw ConfigError(
          "initial angles disagree with the frame at the first node by " +
          format_double(init.worst));
    track_.n = n;
    track_.param = {grid.front()};
    track_.phi = {phi0};  // keep the caller's exact values
    track_.omega = {init.omega};
    for (size_t i = 1; i < grid.size(); ++i) advance(grid[i], 0);
    scan_events(kPi / 2, track_.det_events);
    scan_events(0.0, track_.sin_events);
    return std::move(track_);
  }

 private:
  void advance(double s_next, int depth) {
    UnitaryReduction red = unitary_reduction(src_(s_next));
    MatchResult m = match_branches(red, track_.phi.back(),
                                   &track_.omega.back(), opts_.overlap_weight);
    if (m.worst > opts_.max_step) {
      if (depth >= opts_.max_depth)
        throw NumericError("angle lift refinement exhausted near parameter " +
                           format_double(s_next));
      double mid = 0.5 * (track_.param.back() + s_next);
      advance(mid, depth + 1);
      advance(s_next, depth + 1);
      return;
    }
    track_.param.push_back(s_next);
    track_.phi.push_back(m.phi);
    track_.omega.push_back(m.omega);
  }

  // Lift at an off-node parameter, referenced to the linear interpolation
  // of the two enclosing node values (used only inside event bisection,
  // where steps are already small).
  double branch_value(double s, int i, int branch) {
    double w = (s - track_.param[i]) /
               (track_.param[i + 1] - track_.param[i]);
    Vec ref = (1.0 - w) * track_.phi[i] + w * track_.phi[i + 1];
    UnitaryReduction red = unitary_reduction(src_(s));
    MatchResult m =
        match_branches(red, ref, &track_.omega[i], opts_.overlap_weight);
    return m.phi(branch);
  }

  void scan_events(double offset, std::vector<CrossingEvent>& out) {
    const double from = track_.param.front();
    const double to = track_.param.back();
    for (size_t i = 0; i + 1 < track_.param.size(); ++i) {
      for (int j = 0; j < track_.n; ++j) {
        double a = track_.phi[i](j), b = track_.phi[i + 1](j);
        if (a == b) continue;
        double lo = std::min(a, b), hi = std::max(a, b);
        // Levels offset + k pi with lo < level <= hi.
        int k_last = static_cast<int>(std::floor((hi - offset) / kPi));
        for (int k = k_last;; --k) {
          double level = offset + k * kPi;
          if (level <= lo) break;
          if (level > hi) continue;
          CrossingEvent ev;
          ev.level = level;
          ev.branch = j;
          ev.direction = b > a ? 1 : -1;
          ev.param = locate(i, j, level);
          ev.boundary = (ev.param - from) < opts_.boundary_tol ||
                        (to - ev.param) < opts_.boundary_tol;
          out.push_back(ev);
        }
      }
    }
    std::sort(out.begin(), out.end(),
              [](const CrossingEvent& x, const CrossingEvent& y) {
                return x.param < y.param;
              });
  }

  double locate(size_t i, int branch, double level) {
    double lo = track_.param[i], hi = track_.param[i + 1];
    double glo = track_.phi[i](branch) - level;
    double ghi = track_.phi[i + 1](branch) - level;
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    for (int it = 0; it < 200 && (hi - lo) > opts_.event_tol; ++it) {
      double mid = 0.5 * (lo + hi);
      double gm = branch_value(mid, static_cast<int>(i), branch) - level;
      if (gm == 0.0) return mid;
      if ((gm > 0) == (ghi > 0)) {
        hi = mid;
        ghi = gm;
      } else {
        lo = mid;
        glo = gm;
      }
    }
    return 0.5 * (lo + hi);
  }

  const FrameFn& src_;
  LiftOptions opts_;
  AngleTrack track_;
};

}  // namespace

AngleTrack lift_angles(const FrameFn& source, const std::vector<double>& grid,
                       const Vec& phi0, const LiftOptions& opts) {
  LiftEngine engine(source, opts);
  return engine.run(grid, phi0);
}

CrossingCount count_crossings(const std::vector<CrossingEvent>& events,
                              double from, double to, double boundary_tol) {
  CrossingCount c;
  for (const CrossingEvent& ev : events) {
    if (ev.param <= from || ev.param >= to) continue;
    if (ev.param - from <= boundary_tol || to - ev.param <= boundary_tol) {
      ++c.boundary;
      continue;
    }
    ++c.total;
    if (ev.direction > 0) {
      ++c.upward;
      ++c.net;
    } else {
      ++c.downward;
      --c.net;
    }
  }
  return c;
}

MonotonicityReport check_monotone(const AngleTrack& track, int direction,
                                  double slack) {
  MonotonicityReport rep;
  for (size_t i = 0; i + 1 < track.param.size(); ++i) {
    for (int j = 0; j < track.n; ++j) {
      double d = direction * (track.phi[i + 1](j) - track.phi[i](j));
      if (d < -slack && -d > rep.worst_violation) {
        rep.ok = false;
        rep.worst_violation = -d;
        rep.at_param = track.param[i + 1];
        rep.branch = j;
      }
    }
  }
  return rep;
}

double scalar_xi(double k1, double k2, double tau) {
  if (k2 == 0.0) return std::atan(k1);
  if (k2 < 0.0) return -scalar_xi(-k1, -k2, tau);
  // Near a pole of tan the lift passes through pi/2 + k pi exactly.
  double c = std::cos(tau);
  if (std::abs(c) < 1e-154) {
    double k = std::round(tau / kPi - 0.5);
    return kPi / 2 + k * kPi;
  }
  return std::atan(k1 + k2 * std::tan(tau)) + std::round(tau / kPi) * kPi;
}

double scalar_zeta(double k1, double k2, double tau) {
  return kPi / 2 - scalar_xi(k1, k2, tau);
}

Mat scalar_xi_matrix(double k1, double k2, const Mat& s) {
  EigH e = eigh(s);
  Vec d(e.values.size());
  for (int j = 0; j < d.size(); ++j)
    d(j) = scalar_xi(k1, k2, e.values(j));
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

Mat scalar_zeta_matrix(double k1, double k2, const Mat& s) {
  EigH e = eigh(s);
  Vec d(e.values.size());
  for (int j = 0; j < d.size(); ++j)
    d(j) = scalar_zeta(k1, k2, e.values(j));
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

}  // namespace polarsturm
