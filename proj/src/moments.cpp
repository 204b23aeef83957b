#include "cmcausal/moments.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cmcausal {

namespace {

constexpr std::size_t kChunkRows = 512;

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

void check_finite(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw InputError("non-finite value at row " + std::to_string(i));
  }
}

double mean_of(std::span<const double> v) {
  CompensatedSum s;
  for (double e : v) s.add(e);
  return s.value() / static_cast<double>(v.size());
}

}  // namespace

MomentTable<double> compute_moments(const BivariateSample& sample, int order, bool center) {
  if (order < 1) throw ConfigError("moment order must be >= 1, got " + std::to_string(order));
  const std::size_t n = sample.size();
  if (n == 0) throw InputError("empty sample");

  std::span<const double> xs(sample.x().data(), n);
  std::span<const double> ys(sample.y().data(), n);
  const double mx = center ? mean_of(xs) : 0.0;
  const double my = center ? mean_of(ys) : 0.0;

  const int dim = order + 1;
  std::vector<CompensatedSum> totals(static_cast<std::size_t>(dim * dim));
  std::vector<double> chunk(static_cast<std::size_t>(dim * dim));
  std::vector<double> xp(static_cast<std::size_t>(dim));
  std::vector<double> yp(static_cast<std::size_t>(dim));

  for (std::size_t begin = 0; begin < n; begin += kChunkRows) {
    const std::size_t end = std::min(n, begin + kChunkRows);
    std::fill(chunk.begin(), chunk.end(), 0.0);
    for (std::size_t t = begin; t < end; ++t) {
      const double x = xs[t] - mx;
      const double y = ys[t] - my;
      xp[0] = 1.0;
      yp[0] = 1.0;
      for (int p = 1; p <= order; ++p) {
        xp[p] = xp[p - 1] * x;
        yp[p] = yp[p - 1] * y;
      }
      for (int p = 0; p <= order; ++p) {
        double* row = &chunk[static_cast<std::size_t>(p * dim)];
        for (int q = 0; q + p <= order; ++q) row[q] += xp[p] * yp[q];
      }
    }
    for (int p = 0; p <= order; ++p) {
      for (int q = 0; q + p <= order; ++q) {
        const auto idx = static_cast<std::size_t>(p * dim + q);
        totals[idx].add(chunk[idx]);
      }
    }
  }

  MomentTable<double> out(order, center);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int p = 0; p <= order; ++p) {
    for (int q = 0; q + p <= order; ++q) {
      out(p, q) = totals[static_cast<std::size_t>(p * dim + q)].value() * inv_n;
    }
  }
  out(0, 0) = 1.0;
  return out;
}

MomentTable<double> compute_univariate_moments(std::span<const double> x, int order, bool center) {
  if (order < 1) throw ConfigError("moment order must be >= 1, got " + std::to_string(order));
  if (x.empty()) throw InputError("empty sample");
  check_finite(x);
  const double mx = center ? mean_of(x) : 0.0;

  std::vector<CompensatedSum> totals(static_cast<std::size_t>(order + 1));
  std::vector<double> chunk(static_cast<std::size_t>(order + 1));
  for (std::size_t begin = 0; begin < x.size(); begin += kChunkRows) {
    const std::size_t end = std::min(x.size(), begin + kChunkRows);
    std::fill(chunk.begin(), chunk.end(), 0.0);
    for (std::size_t t = begin; t < end; ++t) {
      const double v = x[t] - mx;
      double pw = 1.0;
      for (int p = 1; p <= order; ++p) {
        pw *= v;
        chunk[static_cast<std::size_t>(p)] += pw;
      }
    }
    for (int p = 1; p <= order; ++p) totals[static_cast<std::size_t>(p)].add(chunk[static_cast<std::size_t>(p)]);
  }

  MomentTable<double> out(order, center);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (int p = 0; p <= order; ++p) {
    for (int q = 0; q + p <= order; ++q) out(p, q) = 0.0;
  }
  out(0, 0) = 1.0;
  for (int p = 1; p <= order; ++p) out(p, 0) = totals[static_cast<std::size_t>(p)].value() * inv_n;
  return out;
}

}  // namespace cmcausal
