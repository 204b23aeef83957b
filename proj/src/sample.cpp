#include "cmcausal/sample.hpp"

#include <cmath>
#include <string>

#include "cmcausal/errors.hpp"

namespace cmcausal {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double centered_scale(const Eigen::VectorXd& v, double mean) {
  return std::sqrt((v.array() - mean).square().mean());
}

}  // namespace

BivariateSample::BivariateSample(Eigen::VectorXd x, Eigen::VectorXd y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) {
    throw InputError("sample series differ in length: " + std::to_string(x_.size()) +
                     " vs " + std::to_string(y_.size()));
  }
  if (x_.size() < 2) {
    throw InputError("sample needs at least 2 rows, got " + std::to_string(x_.size()));
  }
  for (Eigen::Index i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) {
      throw InputError("non-finite value at row " + std::to_string(i));
    }
  }
}

BivariateSample::BivariateSample(const std::vector<double>& x, const std::vector<double>& y)
    : BivariateSample(to_vector(x), to_vector(y)) {}

BivariateSample BivariateSample::standardized() const {
  if (x_.maxCoeff() == x_.minCoeff() || y_.maxCoeff() == y_.minCoeff()) {
    throw InputError("cannot standardize a constant series");
  }
  const double mx = x_.mean();
  const double my = y_.mean();
  const double sx = centered_scale(x_, mx);
  const double sy = centered_scale(y_, my);
  if (!(sx > 0.0) || !(sy > 0.0)) {
    throw InputError("cannot standardize a constant series");
  }
  Eigen::VectorXd xs = (x_.array() - mx) / sx;
  Eigen::VectorXd ys = (y_.array() - my) / sy;
  return BivariateSample(std::move(xs), std::move(ys), Unchecked{});
}

}  // namespace cmcausal
