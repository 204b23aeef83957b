#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "cmcausal/errors.hpp"
#include "cmcausal/moments.hpp"
#include "cmcausal/power_series.hpp"
#include "cmcausal/sample.hpp"

namespace cmcausal {

/// Joint cumulants C(a, b) = Cum(x repeated a times, y repeated b times)
/// for 1 <= a + b <= order. Entry (0, 0) is unused and held at zero.
template <typename Scalar>
class CumulantTable {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit CumulantTable(int order) : order_(order), values_(Matrix::Zero(order + 1, order + 1)) {
    if (order < 1) throw ConfigError("cumulant order must be >= 1");
  }

  int order() const { return order_; }
  Scalar operator()(int a, int b) const { return values_(a, b); }
  Scalar& operator()(int a, int b) { return values_(a, b); }
  const Matrix& values() const { return values_; }

  /// Cumulants of (y, x): C'(a, b) = C(b, a).
  CumulantTable swapped() const {
    CumulantTable out(order_);
    out.values_ = values_.transpose();
    return out;
  }

 private:
  int order_;
  Matrix values_;
};

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

template <typename Scalar>
TruncatedSeries2<Scalar> moment_generating_series(const MomentTable<Scalar>& m) {
  const int n = m.order();
  TruncatedSeries2<Scalar> s(n);
  for (int p = 0; p <= n; ++p) {
    for (int q = 0; p + q <= n; ++q) s(p, q) = m(p, q) / Scalar(factorial(p) * factorial(q));
  }
  return s;
}

}  // namespace detail

/// Moment table -> cumulant table via the logarithm of the moment generating
/// series, truncated at the table's order.
///
/// The log recurrence runs along s; entries with a < b are taken from the run
/// on the transposed table and diagonal entries average the two runs. This
/// makes swapping x and y map C(a, b) to C(b, a) bit for bit.
template <typename Scalar>
CumulantTable<Scalar> moments_to_cumulants_series(const MomentTable<Scalar>& moments) {
  if (!moments.complete()) throw InputError("incomplete moment table");
  const int n = moments.order();
  const auto forward = log(detail::moment_generating_series(moments));
  const auto mirrored = log(detail::moment_generating_series(moments.transposed()));

  CumulantTable<Scalar> out(n);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; a + b <= n; ++b) {
      if (a + b == 0) continue;
      Scalar k;
      if (a > b) {
        k = forward(a, b);
      } else if (a < b) {
        k = mirrored(b, a);
      } else {
        k = Scalar(0.5) * (forward(a, a) + mirrored(a, a));
      }
      out(a, b) = k * Scalar(detail::factorial(a) * detail::factorial(b));
    }
  }
  return out;
}

/// Inverse conversion (series exponential); raw moments with m(0,0) = 1.
template <typename Scalar>
MomentTable<Scalar> cumulants_to_moments_series(const CumulantTable<Scalar>& cumulants) {
  const int n = cumulants.order();
  TruncatedSeries2<Scalar> k(n);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; a + b <= n; ++b) {
      if (a + b == 0) continue;
      k(a, b) = cumulants(a, b) / Scalar(detail::factorial(a) * detail::factorial(b));
    }
  }
  const auto e = exp(k);
  MomentTable<Scalar> out(n, false);
  for (int p = 0; p <= n; ++p) {
    for (int q = 0; p + q <= n; ++q) out(p, q) = e(p, q) * Scalar(detail::factorial(p) * detail::factorial(q));
  }
  out(0, 0) = Scalar(1);
  return out;
}

/// Plug-in joint cumulants of a sample up to total order `order`, computed on
/// mean-centered data. First-order entries hold the sample means.
CumulantTable<double> estimate_cumulants(const BivariateSample& sample, int order);

/// Plug-in estimate of C(a, b)(x, y). Requires a + b >= 1.
double joint_cumulant(const BivariateSample& sample, int a, int b);

/// Univariate cumulants k_1 ... k_order of a series; element r-1 holds k_r.
std::vector<double> univariate_cumulants(std::span<const double> x, int order);

}  // namespace cmcausal
