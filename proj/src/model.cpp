#include "polarsturm/model.hpp"

#include <algorithm>
#include <cmath>

#include "polarsturm/symplectic.hpp"

namespace polarsturm {

CoeffFn CoeffFn::zero(int n) {
  CoeffFn f;
  f.kind_ = CoeffKind::kZero;
  f.n_ = n;
  return f;
}

CoeffFn CoeffFn::constant(const Mat& value) {
  if (value.rows() != value.cols())
    throw ConfigError("coefficient matrices must be square");
  CoeffFn f;
  f.kind_ = CoeffKind::kConstant;
  f.n_ = static_cast<int>(value.rows());
  f.terms_ = {value};
  return f;
}

CoeffFn CoeffFn::polynomial(const std::vector<Mat>& coeffs) {
  if (coeffs.empty()) throw ConfigError("polynomial needs at least one term");
  CoeffFn f;
  f.kind_ = CoeffKind::kPolynomial;
  f.n_ = static_cast<int>(coeffs.front().rows());
  for (const Mat& m : coeffs)
    if (m.rows() != f.n_ || m.cols() != f.n_)
      throw ConfigError("polynomial terms must share one square shape");
  f.terms_ = coeffs;
  return f;
}

CoeffFn CoeffFn::tabulated(const std::vector<double>& grid,
                           const std::vector<Mat>& values) {
  if (grid.size() < 2 || grid.size() != values.size())
    throw ConfigError("tabulated coefficient needs matching grid and values");
  for (size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw ConfigError("tabulated grid must be strictly increasing");
  CoeffFn f;
  f.kind_ = CoeffKind::kTabulated;
  f.n_ = static_cast<int>(values.front().rows());
  for (const Mat& m : values)
    if (m.rows() != f.n_ || m.cols() != f.n_)
      throw ConfigError("tabulated values must share one square shape");
  f.terms_ = values;
  f.grid_ = grid;
  return f;
}

Mat CoeffFn::eval(double tau) const {
  switch (kind_) {
    case CoeffKind::kZero:
      return Mat::Zero(n_, n_);
    case CoeffKind::kConstant:
      return terms_[0];
    case CoeffKind::kPolynomial: {
      Mat out = terms_.back();
      for (int k = static_cast<int>(terms_.size()) - 2; k >= 0; --k)
        out = out * tau + terms_[k];
      return out;
    }
    case CoeffKind::kTabulated: {
      if (tau <= grid_.front()) return terms_.front();
      if (tau >= grid_.back()) return terms_.back();
      auto it = std::upper_bound(grid_.begin(), grid_.end(), tau);
      size_t i = static_cast<size_t>(it - grid_.begin()) - 1;
      double w = (tau - grid_[i]) / (grid_[i + 1] - grid_[i]);
      return (1.0 - w) * terms_[i] + w * terms_[i + 1];
    }
  }
  throw NumericError("unreachable coefficient kind");
}

CoeffFn CoeffFn::axpy(double scale, const CoeffFn& other, double span) const {
  if (other.is_zero() || scale == 0.0) return *this;
  if (is_zero()) {
    // 0 + scale * other: scale the other function term by term.
    CoeffFn f = other;
    for (Mat& m : f.terms_) m *= scale;
    return f;
  }
  if (kind_ == other.kind_) {
    switch (kind_) {
      case CoeffKind::kConstant:
        return constant(terms_[0] + scale * other.terms_[0]);
      case CoeffKind::kPolynomial: {
        std::vector<Mat> c(std::max(terms_.size(), other.terms_.size()),
                           Mat::Zero(n_, n_));
        for (size_t k = 0; k < terms_.size(); ++k) c[k] += terms_[k];
        for (size_t k = 0; k < other.terms_.size(); ++k)
          c[k] += scale * other.terms_[k];
        return polynomial(c);
      }
      case CoeffKind::kTabulated:
        if (grid_ == other.grid_) {
          std::vector<Mat> v(terms_.size());
          for (size_t k = 0; k < terms_.size(); ++k)
            v[k] = terms_[k] + scale * other.terms_[k];
          return tabulated(grid_, v);
        }
        break;
      default:
        break;
    }
  }
  // Fallback: sample both on a dense grid over [0, span].
  const int m = 257;
  std::vector<double> grid(m);
  std::vector<Mat> vals(m);
  for (int i = 0; i < m; ++i) {
    grid[i] = span * i / (m - 1);
    vals[i] = eval(grid[i]) + scale * other.eval(grid[i]);
  }
  return tabulated(grid, vals);
}

CoefficientModel CoefficientModel::constant(const Mat& a, const Mat& b,
                                            const Mat& c) {
  CoefficientModel m;
  m.n = static_cast<int>(a.rows());
  m.a_base = CoeffFn::constant(a);
  m.b_base = CoeffFn::constant(b);
  m.c_base = CoeffFn::constant(c);
  m.a_lin = CoeffFn::zero(m.n);
  m.b_lin = CoeffFn::zero(m.n);
  m.c_lin = CoeffFn::zero(m.n);
  return m;
}

Mat CoefficientModel::a(double tau, double lambda) const {
  Mat v = a_base.eval(tau);
  if (!a_lin.is_zero()) v += lambda * a_lin.eval(tau);
  return v;
}

Mat CoefficientModel::b(double tau, double lambda) const {
  Mat v = b_base.eval(tau);
  if (!b_lin.is_zero()) v += lambda * b_lin.eval(tau);
  return v;
}

Mat CoefficientModel::c(double tau, double lambda) const {
  Mat v = c_base.eval(tau);
  if (!c_lin.is_zero()) v += lambda * c_lin.eval(tau);
  return v;
}

Mat CoefficientModel::s(double tau, double lambda) const {
  Mat sa = a(tau, lambda), sb = b(tau, lambda), sc = c(tau, lambda);
  Mat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = sa;
  out.topRightCorner(n, n) = sb.transpose();
  out.bottomLeftCorner(n, n) = sb;
  out.bottomRightCorner(n, n) = sc;
  return out;
}

Mat CoefficientModel::m(double tau, double lambda) const {
  Mat sa = a(tau, lambda), sb = b(tau, lambda), sc = c(tau, lambda);
  Mat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = sb;
  out.topRightCorner(n, n) = sc;
  out.bottomLeftCorner(n, n) = -sa;
  out.bottomRightCorner(n, n) = -sb.transpose();
  return out;
}

Mat CoefficientModel::s_lambda(double tau) const {
  Mat sa = a_lin.eval(tau), sb = b_lin.eval(tau), sc = c_lin.eval(tau);
  Mat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = sa;
  out.topRightCorner(n, n) = sb.transpose();
  out.bottomLeftCorner(n, n) = sb;
  out.bottomRightCorner(n, n) = sc;
  return out;
}

Mat CoefficientModel::m_lambda(double tau) const {
  Mat sa = a_lin.eval(tau), sb = b_lin.eval(tau), sc = c_lin.eval(tau);
  Mat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = sb;
  out.topRightCorner(n, n) = sc;
  out.bottomLeftCorner(n, n) = -sa;
  out.bottomRightCorner(n, n) = -sb.transpose();
  return out;
}

bool CoefficientModel::has_parameter() const {
  return !a_lin.is_zero() || !b_lin.is_zero() || !c_lin.is_zero();
}

void CoefficientModel::validate(double t_max) const {
  const CoeffFn* parts[] = {&a_base, &b_base, &c_base, &a_lin, &b_lin, &c_lin};
  for (const CoeffFn* p : parts)
    if (p->n() != n)
      throw ConfigError("coefficient dimension does not match model n");
  const CoeffFn* sym_parts[] = {&a_base, &c_base, &a_lin, &c_lin};
  const char* names[] = {"A", "C", "A parameter part", "C parameter part"};
  for (int k = 0; k < 4; ++k) {
    if (sym_parts[k]->is_zero()) continue;
    for (int i = 0; i <= 16; ++i) {
      double tau = t_max * i / 16.0;
      if (symmetry_residual(sym_parts[k]->eval(tau)) > 1e-9)
        throw ConfigError(std::string(names[k]) +
                          " must be symmetric at every time");
    }
  }
}

}  // namespace polarsturm
