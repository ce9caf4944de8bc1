#pragma once

// Dense linear algebra helpers shared across the library: a seeded RNG with
// a fixed bit-to-double mapping (so streams are reproducible across
// platforms), a scaling-and-squaring matrix exponential, joint
// diagonalization of a commuting symmetric pair by one real orthogonal
// basis, symmetric square roots, and conditioning guards.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "polarsturm/errors.hpp"

namespace polarsturm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Singular value ratio above which solves are refused.
inline constexpr double kCondGuard = 1e12;

// ||M - M^T||_F / max(1, ||M||_F)
double symmetry_residual(const Mat& m);
bool is_symmetric(const Mat& m, double tol = 1e-9);
Mat symmetrize(const Mat& m);

// Deterministic random stream. The generator is mt19937_64 and doubles are
// derived from the raw 64-bit output by fixed arithmetic (high 53 bits for
// uniforms, Box-Muller for normals), so a seed pins the exact sequence
// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();                      // [0, 1)
  double uniform(double a, double b);    // [a, b)
  double normal();                       // standard normal
  std::uint64_t bits() { return gen_(); }

  Mat matrix(int rows, int cols, double scale = 1.0);
  Mat symmetric(int n, double scale = 1.0);
  // Symmetric with eigenvalues in [lo, hi] (lo > 0 gives positive definite).
  Mat symmetric_in(int n, double lo, double hi);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// exp(A) by scaling and squaring with a Taylor core; accurate to machine
// precision for the moderate norms and sizes used here.
Mat matrix_exp(const Mat& a);

struct EigH {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns
};
EigH eigh(const Mat& s);

// S must be symmetric positive definite.
Mat symmetric_sqrt(const Mat& s);
Mat symmetric_inv_sqrt(const Mat& s);

// One real orthogonal basis diagonalizing both members of a commuting
// symmetric pair. Seeded with the eigenbasis of x, then polished with
// joint Jacobi sweeps so clustered spectra in either member do not spoil
// the other's diagonalization.
struct JointDiag {
  Mat omega;         // orthogonal, columns are the joint eigenvectors
  Vec x;             // diag(omega^T X omega)
  Vec y;             // diag(omega^T Y omega)
  double off_diag;   // residual max off-diagonal magnitude over both
};
JointDiag joint_diagonalize(const Mat& x, const Mat& y);

double cond_2(const Mat& m);

// Solve A X = B, refusing when cond_2(A) exceeds kCondGuard. The context
// string names the quantity in the error message.
Mat guarded_solve(const Mat& a, const Mat& b, const std::string& context);
Mat guarded_inverse(const Mat& a, const std::string& context);

// Minimum-cost perfect assignment on a square cost matrix; returns the
// column assigned to each row.
std::vector<int> min_cost_assignment(const Mat& cost);

// printf %.17g formatting used everywhere a double is serialized.
std::string format_double(double v);

}  // namespace polarsturm
