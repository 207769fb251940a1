#pragma once

// Truncated univariate Taylor arithmetic. Model fluxes are written against a
// generic scalar, so evaluating them on Taylor values yields the series of
// f(U(x)) along a path U(x) without symbolic differentiation.

#include "radshock/common.hpp"

namespace radshock {

class Taylor {
 public:
  Taylor() : c_(1, 0.0) {}
  Taylor(int order, double c0) : c_(order + 1, 0.0) { c_[0] = c0; }
  static Taylor constant(int order, double v) { return Taylor(order, v); }
  // The local coordinate x itself.
  static Taylor variable(int order) {
    Taylor t(order, 0.0);
    if (order >= 1) t.c_[1] = 1.0;
    return t;
  }
  static Taylor from_coeffs(std::vector<double> c) {
    Taylor t;
    t.c_ = std::move(c);
    if (t.c_.empty()) t.c_.assign(1, 0.0);
    return t;
  }

  int order() const { return int(c_.size()) - 1; }
  double operator[](int k) const { return (k >= 0 && k < int(c_.size())) ? c_[k] : 0.0; }
  double& coeff(int k) { return c_[k]; }
  const std::vector<double>& coeffs() const { return c_; }
  double value() const { return c_[0]; }

  Taylor operator-() const {
    Taylor r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend Taylor operator+(const Taylor& a, const Taylor& b) {
    Taylor r(std::max(a.order(), b.order()), 0.0);
    for (int k = 0; k <= r.order(); ++k) r.c_[k] = a[k] + b[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a, const Taylor& b) { return a + (-b); }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    const int K = std::max(a.order(), b.order());
    Taylor r(K, 0.0);
    for (int k = 0; k <= K; ++k) {
      double s = 0;
      for (int j = 0; j <= k; ++j) s += a[j] * b[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    if (b[0] == 0.0) fail(Err::Internal, "Taylor division by series with zero constant term");
    const int K = std::max(a.order(), b.order());
    Taylor r(K, 0.0);
    for (int k = 0; k <= K; ++k) {
      double s = a[k];
      for (int j = 0; j < k; ++j) s -= r.c_[j] * b[k - j];
      r.c_[k] = s / b[0];
    }
    return r;
  }
  friend Taylor operator+(const Taylor& a, double s) { return a + Taylor(a.order(), s); }
  friend Taylor operator+(double s, const Taylor& a) { return a + s; }
  friend Taylor operator-(const Taylor& a, double s) { return a + (-s); }
  friend Taylor operator-(double s, const Taylor& a) { return (-a) + s; }
  friend Taylor operator*(const Taylor& a, double s) {
    Taylor r = a;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  friend Taylor operator*(double s, const Taylor& a) { return a * s; }
  friend Taylor operator/(const Taylor& a, double s) { return a * (1.0 / s); }
  friend Taylor operator/(double s, const Taylor& a) { return Taylor(a.order(), s) / a; }

  Taylor pow_int(int p) const {
    Taylor r(order(), 1.0);
    for (int i = 0; i < p; ++i) r = r * (*this);
    return r;
  }
  // d/dx, losing one order.
  Taylor derivative() const {
    if (order() == 0) return Taylor(0, 0.0);
    Taylor r(order() - 1, 0.0);
    for (int k = 1; k <= order(); ++k) r.c_[k - 1] = k * c_[k];
    return r;
  }
  double eval(double x) const {
    double s = 0;
    for (int k = order(); k >= 0; --k) s = s * x + c_[k];
    return s;
  }

 private:
  std::vector<double> c_;
};

// Coefficient-list representations of x-series of vectors/matrices.
using VecSeries = std::vector<VecR>;   // sum_k coeff[k] x^k, coeff[k] in R^n
using MatSeries = std::vector<MatR>;   // real matrix series
using CMatSeries = std::vector<MatC>;  // complex matrix series

inline MatC mat_series_eval(const CMatSeries& s, Cplx x) {
  MatC acc = MatC::Zero(s[0].rows(), s[0].cols());
  for (int k = int(s.size()) - 1; k >= 0; --k) acc = acc * x + s[k];
  return acc;
}

inline VecC vec_series_eval(const std::vector<VecC>& s, Cplx x) {
  VecC acc = VecC::Zero(s[0].size());
  for (int k = int(s.size()) - 1; k >= 0; --k) acc = acc * x + s[k];
  return acc;
}

// Convolution coefficient k of product of two matrix series.
inline MatC conv_coeff(const CMatSeries& a, const CMatSeries& b, int k) {
  MatC s = MatC::Zero(a[0].rows(), b[0].cols());
  for (int j = 0; j <= k; ++j) {
    if (j < int(a.size()) && k - j < int(b.size())) s += a[j] * b[k - j];
  }
  return s;
}

// Laurent inversion of a matrix series A(x) = sum A_k x^k whose constant term
// is singular with a simple zero eigenvalue (null pair r0, l0, l0^T A1 r0 != 0).
// Returns B_{-1..K} with A(x)^{-1} = B_{-1}/x + B_0 + B_1 x + ...  The output
// vector is indexed so that out[k] = B_{k-1}.
MatSeries laurent_inverse(const MatSeries& A, int K);

}  // namespace radshock
