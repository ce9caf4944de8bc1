#pragma once

// Independent oracles shared by the tests. Everything here is deliberately
// written against the plain problem statement, not against the library
// internals: a hand-rolled RK4 shooting integrator for scalar equations,
// a bracketing root finder, a brute-force assignment search, and helpers
// that generate admissible boundary data from seeded randomness.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "polarsturm/linalg.hpp"
#include "polarsturm/symplectic.hpp"

namespace oracle {

using polarsturm::Mat;
using polarsturm::Rng;
using polarsturm::Vec;

// Scalar initial value problem q'' = -(a) q with q = q0, q' = p0 at 0;
// returns (q, p)(t). Classic RK4 on the first-order system, nothing
// shared with the library integrator.
inline std::pair<double, double> scalar_shoot(
    const std::function<double(double)>& a, double q0, double p0, double t,
    int steps) {
  double q = q0, p = p0;
  const double h = t / steps;
  auto f = [&](double tau, double qq, double pp, double* dq, double* dp) {
    *dq = pp;
    *dp = -a(tau) * qq;
  };
  for (int i = 0; i < steps; ++i) {
    const double tau = i * h;
    double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
    f(tau, q, p, &k1q, &k1p);
    f(tau + h / 2, q + h / 2 * k1q, p + h / 2 * k1p, &k2q, &k2p);
    f(tau + h / 2, q + h / 2 * k2q, p + h / 2 * k2p, &k3q, &k3p);
    f(tau + h, q + h * k3q, p + h * k3p, &k4q, &k4p);
    q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
  }
  return {q, p};
}

// Zeros of the scalar solution q on (0, t), counted by sign changes of q
// at the step ends of a single fine integration.
inline int scalar_zero_count(const std::function<double(double)>& a,
                             double q0, double p0, double t, int steps) {
  double q = q0, p = p0;
  const double h = t / steps;
  auto f = [&](double tau, double qq, double pp, double* dq, double* dp) {
    *dq = pp;
    *dp = -a(tau) * qq;
  };
  int zeros = 0;
  double prev = q0;
  for (int i = 0; i < steps; ++i) {
    const double tau = i * h;
    double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
    f(tau, q, p, &k1q, &k1p);
    f(tau + h / 2, q + h / 2 * k1q, p + h / 2 * k1p, &k2q, &k2p);
    f(tau + h / 2, q + h / 2 * k2q, p + h / 2 * k2p, &k3q, &k3p);
    f(tau + h, q + h * k3q, p + h * k3p, &k4q, &k4p);
    q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (i + 1 < steps && prev != 0.0 && q != 0.0 && (prev < 0) != (q < 0))
      ++zeros;
    prev = q;
  }
  return zeros;
}

// Bisection on a bracketing interval; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Brute-force minimum-cost assignment by permutation search (n <= 8).
inline std::vector<int> brute_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0;
    for (int i = 0; i < n; ++i) c += cost(i, perm[i]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Admissible left boundary pair (alpha alpha^T + beta beta^T = I,
// alpha beta^T symmetric) as cos/sin of one random symmetric matrix.
inline std::pair<Mat, Mat> admissible_pair(int n, Rng& rng) {
  const Mat th = rng.symmetric(n, 0.9);
  const polarsturm::EigH e = polarsturm::eigh(th);
  Mat co = Mat::Zero(n, n), si = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Mat outer = e.vectors.col(i) * e.vectors.col(i).transpose();
    co += std::cos(e.values(i)) * outer;
    si += std::sin(e.values(i)) * outer;
  }
  return {co, si};
}

// Truncated Taylor sum for exp(A), independent of the library's scaling
// and squaring (only safe for moderate ||A||).
inline Mat taylor_exp(const Mat& a, int terms) {
  Mat sum = Mat::Identity(a.rows(), a.cols());
  Mat term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = (term * a) / k;
    sum += term;
  }
  return sum;
}

}  // namespace oracle
