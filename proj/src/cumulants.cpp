#include "cmcausal/cumulants.hpp"

#include <string>

namespace cmcausal {

CumulantTable<double> estimate_cumulants(const BivariateSample& sample, int order) {
  const auto moments = compute_moments(sample, order, /*center=*/true);
  auto table = moments_to_cumulants_series(moments);
  table(1, 0) = sample.x().mean();
  table(0, 1) = sample.y().mean();
  return table;
}

double joint_cumulant(const BivariateSample& sample, int a, int b) {
  if (a < 0 || b < 0 || a + b < 1) {
    throw ConfigError("joint cumulant needs a, b >= 0 and a + b >= 1 (got " + std::to_string(a) +
                      ", " + std::to_string(b) + ")");
  }
  return estimate_cumulants(sample, a + b)(a, b);
}

std::vector<double> univariate_cumulants(std::span<const double> x, int order) {
  const auto moments = compute_univariate_moments(x, order, /*center=*/true);
  const auto table = moments_to_cumulants_series(moments);
  std::vector<double> out(static_cast<std::size_t>(order));
  for (int r = 1; r <= order; ++r) out[static_cast<std::size_t>(r - 1)] = table(r, 0);
  double mean = 0.0;
  for (double v : x) mean += v;
  out[0] = mean / static_cast<double>(x.size());
  return out;
}

}  // namespace cmcausal
