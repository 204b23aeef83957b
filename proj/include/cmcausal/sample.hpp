#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace cmcausal {

/// Two aligned observation series. Construction validates that both series
/// have the same length n >= 2 and contain only finite values.
class BivariateSample {
 public:
  BivariateSample(Eigen::VectorXd x, Eigen::VectorXd y);
  BivariateSample(const std::vector<double>& x, const std::vector<double>& y);

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.size()); }

  /// The same sample with the roles of x and y exchanged.
  BivariateSample swapped() const { return BivariateSample(y_, x_, Unchecked{}); }

  /// Mean-centered, unit-variance copy (population variance, 1/n).
  /// Throws InputError if either series is constant.
  BivariateSample standardized() const;

 private:
  struct Unchecked {};
  BivariateSample(Eigen::VectorXd x, Eigen::VectorXd y, Unchecked)
      : x_(std::move(x)), y_(std::move(y)) {}

  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
};

}  // namespace cmcausal
