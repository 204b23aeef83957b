#pragma once

#include <cmath>

#include <Eigen/Core>

#include "cmcausal/errors.hpp"

namespace cmcausal {

/// Bivariate formal power series sum c(p, q) s^p t^q truncated at total
/// degree `degree`. Coefficients with p + q > degree are kept at zero.
template <typename Scalar>
class TruncatedSeries2 {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit TruncatedSeries2(int degree)
      : degree_(degree), coeffs_(Matrix::Zero(degree + 1, degree + 1)) {
    if (degree < 0) throw ConfigError("series degree must be >= 0");
  }

  int degree() const { return degree_; }
  Scalar operator()(int p, int q) const { return coeffs_(p, q); }
  Scalar& operator()(int p, int q) { return coeffs_(p, q); }
  const Matrix& coefficients() const { return coeffs_; }

  TruncatedSeries2 transposed() const {
    TruncatedSeries2 out(degree_);
    out.coeffs_ = coeffs_.transpose();
    return out;
  }

 private:
  int degree_;
  Matrix coeffs_;
};

/// Truncated product.
template <typename Scalar>
TruncatedSeries2<Scalar> operator*(const TruncatedSeries2<Scalar>& a, const TruncatedSeries2<Scalar>& b) {
  if (a.degree() != b.degree()) throw ConfigError("series degrees differ");
  const int n = a.degree();
  TruncatedSeries2<Scalar> out(n);
  for (int p = 0; p <= n; ++p) {
    for (int q = 0; p + q <= n; ++q) {
      Scalar acc(0);
      for (int i = 0; i <= p; ++i) {
        for (int j = 0; j <= q; ++j) acc += a(i, j) * b(p - i, q - j);
      }
      out(p, q) = acc;
    }
  }
  return out;
}

/// Logarithm of a series with positive constant term.
///
/// From S * (log S)_s = S_s: for p >= 1
///   p k(p,q) c(0,0) = p c(p,q) - sum_{(i,j) != (p,q), i >= 1} i k(i,j) c(p-i, q-j),
/// and the pure-t column follows the same recurrence in t. Coefficients with
/// p >= 1 never depend on the pure-t column.
template <typename Scalar>
TruncatedSeries2<Scalar> log(const TruncatedSeries2<Scalar>& s) {
  using std::log;
  const Scalar c00 = s(0, 0);
  if (!(c00 > Scalar(0))) throw InputError("series logarithm needs a positive constant term");
  const int n = s.degree();
  TruncatedSeries2<Scalar> k(n);
  k(0, 0) = log(c00);

  for (int total = 1; total <= n; ++total) {
    for (int p = 1; p <= total; ++p) {
      const int q = total - p;
      Scalar acc = Scalar(p) * s(p, q);
      for (int i = 1; i <= p; ++i) {
        for (int j = 0; j <= q; ++j) {
          if (i == p && j == q) continue;
          acc -= Scalar(i) * k(i, j) * s(p - i, q - j);
        }
      }
      k(p, q) = acc / (Scalar(p) * c00);
    }
    Scalar acc = Scalar(total) * s(0, total);
    for (int j = 1; j < total; ++j) acc -= Scalar(j) * k(0, j) * s(0, total - j);
    k(0, total) = acc / (Scalar(total) * c00);
  }
  return k;
}

/// Exponential, the inverse of log: E_s = E * K_s with E(0,0) = exp(K(0,0)).
template <typename Scalar>
TruncatedSeries2<Scalar> exp(const TruncatedSeries2<Scalar>& s) {
  using std::exp;
  const int n = s.degree();
  TruncatedSeries2<Scalar> e(n);
  e(0, 0) = exp(s(0, 0));

  for (int total = 1; total <= n; ++total) {
    for (int p = 1; p <= total; ++p) {
      const int q = total - p;
      Scalar acc(0);
      for (int i = 1; i <= p; ++i) {
        for (int j = 0; j <= q; ++j) acc += Scalar(i) * s(i, j) * e(p - i, q - j);
      }
      e(p, q) = acc / Scalar(p);
    }
    Scalar acc(0);
    for (int j = 1; j <= total; ++j) acc += Scalar(j) * s(0, j) * e(0, total - j);
    e(0, total) = acc / Scalar(total);
  }
  return e;
}

}  // namespace cmcausal
