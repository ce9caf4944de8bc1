#include "polarsturm/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace polarsturm {

double symmetry_residual(const Mat& m) {
  return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

bool is_symmetric(const Mat& m, double tol) {
  return m.rows() == m.cols() && symmetry_residual(m) <= tol;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

double Rng::uniform() {
  // High 53 bits scaled into [0, 1); exact same doubles on every platform.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u clamped away from zero so the log is finite.
  double u = uniform();
  if (u <= 0.0) u = 0x1.0p-53;
  double v = uniform();
  double r = std::sqrt(-2.0 * std::log(u));
  spare_ = r * std::sin(2.0 * kPi * v);
  have_spare_ = true;
  return r * std::cos(2.0 * kPi * v);
}

Mat Rng::matrix(int rows, int cols, double scale) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * normal();
  return m;
}

Mat Rng::symmetric(int n, double scale) {
  return symmetrize(matrix(n, n, scale));
}

Mat Rng::symmetric_in(int n, double lo, double hi) {
  // Random orthogonal basis from a QR factorization, spectrum uniform in
  // [lo, hi].
  Mat g = matrix(n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = uniform(lo, hi);
  return symmetrize(q * d.asDiagonal() * q.transpose());
}

Mat matrix_exp(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  int s = 0;
  if (norm > 0.5) {
    s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  Mat b = a / std::ldexp(1.0, s);
  Mat term = Mat::Identity(n, n);
  Mat sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.norm() <= 1e-19 * sum.norm()) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

EigH eigh(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(s));
  if (es.info() != Eigen::Success)
    throw NumericError("symmetric eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat symmetric_sqrt(const Mat& s) {
  EigH e = eigh(s);
  if (e.values.minCoeff() <= 0.0)
    throw NumericError("symmetric_sqrt: matrix not positive definite");
  return e.vectors * e.values.cwiseSqrt().asDiagonal() * e.vectors.transpose();
}

Mat symmetric_inv_sqrt(const Mat& s) {
  EigH e = eigh(s);
  if (e.values.minCoeff() <= 0.0)
    throw NumericError("symmetric_inv_sqrt: matrix not positive definite");
  return e.vectors * e.values.cwiseSqrt().cwiseInverse().asDiagonal() *
         e.vectors.transpose();
}

namespace {

// One Jacobi sweep jointly reducing the off-diagonal mass of two symmetric
// matrices with a shared rotation (closed-form optimal angle for a pair).
double joint_jacobi_sweep(Mat& x, Mat& y, Mat& omega) {
  const int n = static_cast<int>(x.rows());
  double moved = 0.0;
  for (int p = 0; p < n - 1; ++p) {
    for (int q = p + 1; q < n; ++q) {
      // 2x2 objective matrix G = sum_k g_k g_k^T with
      // g_k = (m_pp - m_qq, 2 m_pq).
      double g11 = 0.0, g12 = 0.0, g22 = 0.0;
      for (const Mat* m : {&x, &y}) {
        double h1 = (*m)(p, p) - (*m)(q, q);
        double h2 = 2.0 * (*m)(p, q);
        g11 += h1 * h1;
        g12 += h1 * h2;
        g22 += h2 * h2;
      }
      // Dominant eigenvector (vx, vy) of G, normalized with vx >= 0.
      double delta = 0.5 * (g11 - g22);
      double mu = std::hypot(delta, g12);
      if (mu == 0.0) continue;
      double vx, vy;
      if (delta >= 0.0) {
        vx = mu + delta;
        vy = g12;
      } else {
        vx = g12 >= 0.0 ? g12 : -g12;
        vy = g12 >= 0.0 ? (mu - delta) : -(mu - delta);
      }
      double vn = std::hypot(vx, vy);
      if (vn == 0.0) continue;
      vx /= vn;
      vy /= vn;
      double c = std::sqrt(0.5 * (vx + 1.0));
      if (c < 1e-12) continue;  // already optimal up to a swap
      double s = vy / (2.0 * c);
      if (std::abs(s) < 1e-17) continue;
      moved += s * s;
      auto rotate = [&](Mat& m) {
        for (int i = 0; i < n; ++i) {
          double mip = m(i, p), miq = m(i, q);
          m(i, p) = c * mip + s * miq;
          m(i, q) = -s * mip + c * miq;
        }
        for (int i = 0; i < n; ++i) {
          double mpi = m(p, i), mqi = m(q, i);
          m(p, i) = c * mpi + s * mqi;
          m(q, i) = -s * mpi + c * mqi;
        }
      };
      rotate(x);
      rotate(y);
      for (int i = 0; i < n; ++i) {
        double oip = omega(i, p), oiq = omega(i, q);
        omega(i, p) = c * oip + s * oiq;
        omega(i, q) = -s * oip + c * oiq;
      }
    }
  }
  return moved;
}

}  // namespace

JointDiag joint_diagonalize(const Mat& x, const Mat& y) {
  const int n = static_cast<int>(x.rows());
  JointDiag out;
  // Seed with the eigenbasis of x, then polish jointly; the sweeps fix the
  // arbitrary mixing the seed leaves inside clustered eigenvalues of x.
  out.omega = eigh(x).vectors;
  Mat xr = out.omega.transpose() * x * out.omega;
  Mat yr = out.omega.transpose() * y * out.omega;
  for (int sweep = 0; sweep < 60; ++sweep) {
    double moved = joint_jacobi_sweep(xr, yr, out.omega);
    if (moved < 1e-30) break;
  }
  out.x = xr.diagonal();
  out.y = yr.diagonal();
  double off = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) off = std::max(off, std::max(std::abs(xr(i, j)), std::abs(yr(i, j))));
  out.off_diag = off;
  return out;
}

double cond_2(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

Mat guarded_solve(const Mat& a, const Mat& b, const std::string& context) {
  if (cond_2(a) > kCondGuard)
    throw NumericError(context + ": matrix condition number exceeds 1e12");
  return a.partialPivLu().solve(b);
}

Mat guarded_inverse(const Mat& a, const std::string& context) {
  return guarded_solve(a, Mat::Identity(a.rows(), a.cols()), context);
}

std::vector<int> min_cost_assignment(const Mat& cost) {
  // Hungarian algorithm with potentials, O(n^3); cost must be square.
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace polarsturm
