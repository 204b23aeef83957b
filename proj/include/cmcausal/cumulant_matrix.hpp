#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "cmcausal/cumulants.hpp"
#include "cmcausal/errors.hpp"

namespace cmcausal {

enum class Orientation { xy, yx };

/// k x k Hankel matrix of order-(2k-1) joint cumulants. With 1-based (i, j)
/// the entry is C(2k+1-i-j, i+j-2); for Orientation::yx the roles of x and y
/// are exchanged.
template <typename Scalar>
struct CumulantMatrix {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  int k = 0;
  Orientation orientation = Orientation::xy;
  Matrix entries;

  int source_order() const { return 2 * k - 1; }
};

template <typename Scalar>
CumulantMatrix<Scalar> build_cumulant_matrix(const CumulantTable<Scalar>& cumulants, int k,
                                             Orientation orientation) {
  if (k < 1) throw ConfigError("cumulant matrix order must be >= 1");
  if (cumulants.order() < 2 * k - 1) {
    throw ConfigError("cumulant table of order " + std::to_string(cumulants.order()) +
                      " cannot fill a " + std::to_string(k) + "x" + std::to_string(k) +
                      " matrix (needs order " + std::to_string(2 * k - 1) + ")");
  }
  CumulantMatrix<Scalar> out;
  out.k = k;
  out.orientation = orientation;
  out.entries.resize(k, k);
  // 0-based (r, c): a = 2k - 1 - r - c, b = r + c.
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const int a = 2 * k - 1 - r - c;
      const int b = r + c;
      out.entries(r, c) = orientation == Orientation::xy ? cumulants(a, b) : cumulants(b, a);
    }
  }
  return out;
}

template <typename Scalar>
struct RankReport {
  int rank = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> singular_values;  // descending
  Scalar tolerance_used = Scalar(0);                          // absolute cut: rel_tol * sigma_max
  bool deficient = false;
};

/// Numerical rank: singular values strictly above rel_tol * sigma_max.
template <typename Scalar>
RankReport<Scalar> matrix_rank(const CumulantMatrix<Scalar>& m, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("rank tolerance must lie in (0, 1)");
  Eigen::JacobiSVD<typename CumulantMatrix<Scalar>::Matrix> svd(m.entries);
  RankReport<Scalar> out;
  out.singular_values = svd.singularValues();
  const Scalar sigma_max = out.singular_values.size() > 0 ? out.singular_values(0) : Scalar(0);
  out.tolerance_used = Scalar(rel_tol) * sigma_max;
  out.rank = 0;
  if (sigma_max > Scalar(0)) {
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
      if (out.singular_values(i) > out.tolerance_used) ++out.rank;
    }
  }
  out.deficient = out.rank < m.k;
  return out;
}

/// |det|, from a fully pivoted LU factorization.
template <typename Scalar>
Scalar matrix_abs_determinant(const CumulantMatrix<Scalar>& m) {
  using std::abs;
  if (m.entries.rows() != m.entries.cols()) throw ConfigError("determinant of a non-square matrix");
  return abs(m.entries.fullPivLu().determinant());
}

}  // namespace cmcausal
