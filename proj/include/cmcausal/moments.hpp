#pragma once

#include <limits>
#include <span>

#include <Eigen/Core>

#include "cmcausal/errors.hpp"
#include "cmcausal/sample.hpp"

namespace cmcausal {

/// Bivariate moments m(p, q) = E[x^p y^q] for all p + q <= order.
///
/// Storage is a dense (order+1) x (order+1) array; cells with p + q > order
/// are unused. Freshly constructed tables hold NaN everywhere except
/// m(0, 0) = 1, so a partially filled table is detectable.
template <typename Scalar>
class MomentTable {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  MomentTable(int order, bool centered) : order_(order), centered_(centered) {
    if (order < 1) throw ConfigError("moment order must be >= 1");
    values_ = Matrix::Constant(order + 1, order + 1, std::numeric_limits<Scalar>::quiet_NaN());
    values_(0, 0) = Scalar(1);
  }

  int order() const { return order_; }
  bool centered() const { return centered_; }

  Scalar operator()(int p, int q) const { return values_(p, q); }
  Scalar& operator()(int p, int q) { return values_(p, q); }

  const Matrix& values() const { return values_; }

  /// True when every entry with p + q <= order is finite and m(0,0) = 1.
  bool complete() const {
    if (values_(0, 0) != Scalar(1)) return false;
    for (int p = 0; p <= order_; ++p) {
      for (int q = 0; q + p <= order_; ++q) {
        using std::isfinite;
        if (!isfinite(values_(p, q))) return false;
      }
    }
    return true;
  }

  /// Moments of (y, x): m'(p, q) = m(q, p).
  MomentTable transposed() const {
    MomentTable out(order_, centered_);
    out.values_ = values_.transpose();
    return out;
  }

 private:
  int order_;
  bool centered_;
  Matrix values_;
};

/// Sample moments (1/n) sum x^p y^q up to total order `order`, optionally on
/// mean-centered data. Sums are accumulated per fixed-size chunk and the
/// chunk totals combined with Neumaier compensation, so results do not depend
/// on thread scheduling.
MomentTable<double> compute_moments(const BivariateSample& sample, int order, bool center);

/// Univariate power moments E[x^p], p <= order, stored in column q = 0 of a
/// bivariate table (the q > 0 entries are zero).
MomentTable<double> compute_univariate_moments(std::span<const double> x, int order, bool center);

}  // namespace cmcausal
