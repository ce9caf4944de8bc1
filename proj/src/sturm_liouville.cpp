#include "polarsturm/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace polarsturm {

namespace {

void check_positive(const CoeffFn& f, double t, const char* what) {
  for (int i = 0; i <= 16; ++i) {
    double tau = t * i / 16.0;
    if (eigh(symmetrize(f.eval(tau))).values.minCoeff() <= 0.0)
      throw ConfigError(std::string(what) + " must be positive definite");
  }
}

// Composite-Simpson antiderivative of a matrix sample sequence on a
// uniform grid with an even number of intervals; values land on the even
// subgrid (every second node).
std::vector<Mat> cumulative_simpson_local(const std::vector<Mat>& f,
                                          double h) {
  std::vector<Mat> out;
  out.reserve((f.size() + 1) / 2);
  Mat acc = Mat::Zero(f.front().rows(), f.front().cols());
  out.push_back(acc);
  for (size_t k = 0; k + 2 < f.size(); k += 2) {
    acc += (h / 3.0) * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    out.push_back(acc);
  }
  return out;
}

}  // namespace

Mat NormalizedSL::l1() const {
  Mat m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = alpha0;
  m.topRightCorner(n, n) = -beta0;
  m.bottomLeftCorner(n, n) = beta0;
  m.bottomRightCorner(n, n) = alpha0;
  return m;
}

Mat NormalizedSL::l2() const {
  Mat m = Mat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = delta;
  m.topRightCorner(n, n) = -Mat::Identity(n, n);
  m.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return m;
}

NormalizedSL normalize_sl(const SLProblem& p) {
  const int n = p.c0.n();
  if (n <= 0) throw ConfigError("empty coefficient");
  if (p.d.n() != n || p.e.n() != n)
    throw ConfigError("coefficient dimensions disagree");
  if (p.alpha0.rows() != n || p.alpha0.cols() != n || p.beta0.rows() != n ||
      p.beta0.cols() != n || p.gamma1.rows() != n || p.gamma1.cols() != n ||
      p.delta1.rows() != n || p.delta1.cols() != n)
    throw ConfigError("boundary matrix dimensions disagree");
  if (p.t <= 0.0) throw ConfigError("interval length must be positive");
  if (symmetry_residual(p.alpha0 * p.beta0.transpose()) > 1e-9)
    throw ConfigError("left condition is not self-adjoint: alpha0 beta0^T "
                      "must be symmetric");
  if (symmetry_residual(p.gamma1 * p.delta1.transpose()) > 1e-9)
    throw ConfigError("right condition is not self-adjoint: gamma1 delta1^T "
                      "must be symmetric");
  Mat s = p.alpha0 * p.alpha0.transpose() + p.beta0 * p.beta0.transpose();
  if (eigh(symmetrize(s)).values.minCoeff() <= 1e-12)
    throw ConfigError("left boundary pair is rank deficient");
  check_positive(p.c0, p.t, "C0");
  check_positive(p.e, p.t, "E");

  Eigen::FullPivLU<Mat> lu(p.gamma1);
  if (!lu.isInvertible())
    throw ConfigError("gamma1 must be invertible: the right condition has "
                      "to determine q(t) from p(t)");

  NormalizedSL out;
  out.n = n;
  out.t = p.t;
  Mat r = symmetric_inv_sqrt(symmetrize(s));
  out.alpha0 = r * p.alpha0;
  out.beta0 = r * p.beta0;
  out.delta = guarded_solve(p.gamma1, p.delta1, "gamma1 in the right "
                                                "boundary condition");
  if (symmetry_residual(out.delta) > 1e-8)
    throw ConfigError("gamma1^{-1} delta1 is not symmetric");
  out.delta = symmetrize(out.delta);

  out.model.n = n;
  out.model.a_base = CoeffFn::zero(n).axpy(-1.0, p.d, p.t);
  out.model.a_lin = p.e;
  out.model.b_base = CoeffFn::zero(n);
  out.model.b_lin = CoeffFn::zero(n);
  out.model.c_base = p.c0;
  out.model.c_lin = CoeffFn::zero(n);
  out.model.validate(p.t);
  return out;
}

LagrangianPair sl_pair(const SymplecticFrame& base, const Mat& alpha0,
                       const Mat& beta0, const Mat& delta) {
  Mat x = alpha0 * base.q2.transpose() - beta0 * base.q1.transpose();
  Mat z = alpha0 * base.p2.transpose() - beta0 * base.p1.transpose();
  return LagrangianPair{x * delta + z, -x};
}

SLSolver::SLSolver(NormalizedSL sl, double h, int grid_nodes,
                   LiftOptions opts)
    : sl_(std::move(sl)), h_(h), grid_nodes_(grid_nodes), opts_(opts) {
  if (h_ <= 0.0) throw ConfigError("step size must be positive");
  if (grid_nodes_ <= 1) grid_nodes_ = 129;
  LagrangianPair p0 = sl_pair(SymplecticFrame::identity(sl_.n), sl_.alpha0,
                              sl_.beta0, sl_.delta);
  phi0_ = raw_half_angles(unitary_reduction(p0));
}

SLSolver::CacheEntry& SLSolver::entry(double lambda) {
  auto it = cache_.find(lambda);
  if (it != cache_.end()) return it->second;
  if (cache_.size() > 64) cache_.clear();
  CacheEntry ce;
  ce.flow = std::make_shared<FlowSolution>(
      integrate_fundamental(sl_.model, lambda, sl_.t, h_));
  return cache_.emplace(lambda, std::move(ce)).first->second;
}

std::shared_ptr<const FlowSolution> SLSolver::flow(double lambda) {
  return entry(lambda).flow;
}

FrameFn SLSolver::frame_fn(double lambda) {
  auto f = flow(lambda);
  return [f, a0 = sl_.alpha0, b0 = sl_.beta0, d = sl_.delta](double tau) {
    return sl_pair(SymplecticFrame::from_matrix(f->at(tau)), a0, b0, d);
  };
}

std::shared_ptr<const AngleTrack> SLSolver::track(double lambda) {
  CacheEntry& ce = entry(lambda);
  if (!ce.track) {
    AngleTrack tr = lift_angles(frame_fn(lambda),
                                uniform_grid(0.0, sl_.t, grid_nodes_),
                                phi0_, opts_);
    ce.track = std::make_shared<AngleTrack>(std::move(tr));
  }
  return ce.track;
}

Vec SLSolver::end_angles(double lambda) {
  return track(lambda)->sorted_end_phi();
}

std::vector<Vec> SLSolver::lambda_surface(const std::vector<double>& lambdas) {
  std::vector<Vec> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(end_angles(l));
  return out;
}

double SLSolver::quotient_norm(double lambda) {
  LagrangianPair p = frame_fn(lambda)(sl_.t);
  // Invariant under any left factor, so equilibrate the rows first; that
  // keeps the solve sane when the frame has grown to e^{hundreds}.
  Mat q2 = p.q2, q1 = p.q1;
  for (int r = 0; r < sl_.n; ++r) {
    double s = std::hypot(q2.row(r).norm(), q1.row(r).norm());
    if (s > 0.0) {
      q2.row(r) /= s;
      q1.row(r) /= s;
    }
  }
  Mat quot = q2.partialPivLu().solve(q1);
  if (!quot.allFinite()) return std::numeric_limits<double>::infinity();
  return quot.norm();
}

BranchLimits SLSolver::estimate_branch_limits(double lambda_start,
                                              double threshold,
                                              int max_doublings) {
  if (lambda_start >= 0.0)
    throw ConfigError("the downward search must start at a negative lambda");
  BranchLimits out;
  double lambda = lambda_start;
  for (int d = 0;; ++d) {
    double qn = quotient_norm(lambda);
    if (qn < threshold) {
      out.lambda_min = lambda;
      out.quotient_norm = qn;
      out.doublings = d;
      break;
    }
    if (d >= max_doublings)
      throw NumericError("branch limits did not flatten after " +
                         std::to_string(max_doublings) + " doublings");
    lambda *= 2.0;
  }
  out.end_phi = end_angles(out.lambda_min);
  out.l.resize(sl_.n);
  for (int j = 0; j < sl_.n; ++j)
    out.l[j] = static_cast<int>(std::lround(out.end_phi(j) / kPi));
  return out;
}

SLEigenvalue SLSolver::solve_branch(const BranchLimits& bl, int branch,
                                    int k) {
  if (branch < 0 || branch >= sl_.n) throw ConfigError("branch out of range");
  if (k < 0) throw ConfigError("eigenvalue number must be nonnegative");
  const double target = (bl.l[branch] - k - 0.5) * kPi;
  double lo = bl.lambda_min;
  if (end_angles(lo)(branch) <= target)
    throw NumericError("branch limit estimate is inconsistent with the "
                       "requested level");
  double span = std::max(1.0, std::abs(lo));
  double hi = lo + span;
  while (end_angles(hi)(branch) > target) {
    span *= 2.0;
    hi = lo + span;
    if (span > 1e12)
      throw NumericError("no upper bracket for the eigenvalue");
  }
  while (hi - lo > bisection_tol * std::max(1.0, 0.5 * std::abs(lo + hi))) {
    double mid = 0.5 * (lo + hi);
    if (end_angles(mid)(branch) > target)
      lo = mid;
    else
      hi = mid;
  }
  SLEigenvalue eig;
  eig.lambda = 0.5 * (lo + hi);
  eig.branch = branch;
  eig.k = k;
  eig.target = target;
  auto tr = track(eig.lambda);
  int best = 0;
  for (int j = 1; j < sl_.n; ++j)
    if (std::abs(tr->end_phi()(j) - target) <
        std::abs(tr->end_phi()(best) - target))
      best = j;
  eig.end_angle_residual = std::abs(tr->end_phi()(best) - target);
  for (const CrossingEvent& ev : tr->sin_events)
    if (ev.branch == best && !ev.boundary) ++eig.zero_count;
  return eig;
}

std::vector<SLEigenvalue> SLSolver::solve_first(int count) {
  if (count <= 0) return {};
  BranchLimits bl = estimate_branch_limits();
  std::vector<SLEigenvalue> all;
  for (int j = 0; j < sl_.n; ++j)
    for (int k = 0; k < count; ++k) all.push_back(solve_branch(bl, j, k));
  std::sort(all.begin(), all.end(),
            [](const SLEigenvalue& a, const SLEigenvalue& b) {
              return a.lambda < b.lambda;
            });
  all.resize(static_cast<size_t>(count));
  return all;
}

SLEigenfunction SLSolver::eigenfunction(const SLEigenvalue& eig,
                                        int output_nodes) {
  if (output_nodes <= 2) output_nodes = 257;
  if (output_nodes % 2 == 0) ++output_nodes;  // Simpson wants even intervals
  SLEigenfunction out;
  out.eig = eig;
  auto fl = flow(eig.lambda);
  auto tr = track(eig.lambda);
  int best = 0;
  for (int j = 1; j < sl_.n; ++j)
    if (std::abs(tr->end_phi()(j) - eig.target) <
        std::abs(tr->end_phi()(best) - eig.target))
      best = j;

  LagrangianPair end_pair = frame_fn(eig.lambda)(sl_.t);
  RealRadius rad = real_radius(end_pair, tr->omega.back(), tr->end_phi());
  out.realness_residual = rad.imag_residual;
  Mat rhs = tr->omega.back().col(best);
  Vec c = guarded_solve(rad.r.transpose(), rhs,
                        "radius factor at the right end")
              .col(0);
  out.kernel_residual =
      (end_pair.q2.transpose() * c).norm() / std::max(1e-300, c.norm());

  out.tau = uniform_grid(0.0, sl_.t, output_nodes);
  out.q.reserve(out.tau.size());
  out.p.reserve(out.tau.size());
  for (double tau : out.tau) {
    SymplecticFrame f = SymplecticFrame::from_matrix(fl->at(tau));
    Mat x = sl_.alpha0 * f.q2.transpose() - sl_.beta0 * f.q1.transpose();
    Mat z = sl_.alpha0 * f.p2.transpose() - sl_.beta0 * f.p1.transpose();
    out.q.push_back(-x.transpose() * c);
    out.p.push_back(-z.transpose() * c);
  }

  // Normalize to unit E-weighted norm, then pin the overall sign through
  // the largest kernel coefficient.
  double hh = out.tau[1] - out.tau[0];
  double norm2 = 0.0;
  for (size_t i = 0; i < out.tau.size(); ++i) {
    double w = (i == 0 || i + 1 == out.tau.size()) ? 1.0
               : (i % 2 == 1)                      ? 4.0
                                                   : 2.0;
    Mat e = sl_.model.a_lin.eval(out.tau[i]);
    norm2 += w * (hh / 3.0) * out.q[i].dot(e * out.q[i]);
  }
  if (norm2 <= 0.0) throw NumericError("eigenfunction has no E-mass");
  double scale = 1.0 / std::sqrt(norm2);
  int imax = 0;
  for (int i = 1; i < c.size(); ++i)
    if (std::abs(c(i)) > std::abs(c(imax))) imax = i;
  if (c(imax) < 0.0) scale = -scale;
  c *= scale;
  for (Vec& v : out.q) v *= scale;
  for (Vec& v : out.p) v *= scale;
  out.c = c;

  out.left_bc_residual =
      (sl_.beta0 * out.q.front() + sl_.alpha0 * out.p.front()).norm();
  out.right_bc_residual = (sl_.delta * out.q.back() + out.p.back()).norm();
  return out;
}

BoundaryFamilySensitivity SLSolver::c2_quadrature(double lambda) {
  auto fl = flow(lambda);
  const std::vector<double>& grid = fl->grid();
  std::vector<Mat> integrand;
  integrand.reserve(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) {
    SymplecticFrame f = SymplecticFrame::from_matrix(fl->frames()[k]);
    Mat x = sl_.alpha0 * f.q2.transpose() - sl_.beta0 * f.q1.transpose();
    integrand.push_back(x * sl_.model.a_lin.eval(grid[k]) * x.transpose());
  }
  std::vector<Mat> cum = cumulative_simpson_local(integrand, fl->step());
  BoundaryFamilySensitivity out;
  out.tau.reserve(cum.size());
  out.c2.reserve(cum.size());
  for (size_t j = 0; j < cum.size(); ++j) {
    out.tau.push_back(grid[2 * j]);
    out.c2.push_back(-cum[j]);
  }
  return out;
}

}  // namespace polarsturm
