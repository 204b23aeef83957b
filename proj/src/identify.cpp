#include "cmcausal/identify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmcausal/errors.hpp"

namespace cmcausal {

namespace {

constexpr int kLargestOrder = 8;

int top_matrix_order(const IdentifyConfig& config) {
  return config.assumed_latents ? *config.assumed_latents + 2 : config.k_max;
}

int required_table_order(const IdentifyConfig& config) {
  return std::max(2 * top_matrix_order(config) - 1, 4);
}

std::optional<IndependenceProbe> probe_independence(const MomentTable<double>& m, std::size_t n,
                                                    double z_threshold) {
  if (m.order() < 4 || n == 0) return std::nullopt;
  const double nn = static_cast<double>(n);
  // Var C(2,1) under independence: Var(x^2) Var(y) / n.
  const double var21 = (m(4, 0) - m(2, 0) * m(2, 0)) * m(0, 2) / nn;
  const double var12 = (m(0, 4) - m(0, 2) * m(0, 2)) * m(2, 0) / nn;
  if (!(var21 > 0.0) || !(var12 > 0.0)) return std::nullopt;
  IndependenceProbe probe;
  probe.z21 = m(2, 1) / std::sqrt(var21);
  probe.z12 = m(1, 2) / std::sqrt(var12);
  probe.independent = std::abs(probe.z21) < z_threshold && std::abs(probe.z12) < z_threshold;
  return probe;
}

bool determinants_equal(double dxy, double dyx, const IdentifyConfig& config) {
  const double diff = std::abs(dxy - dyx);
  if (config.epsilon_mode == EpsilonMode::absolute) return diff < config.epsilon;
  const double scale = std::max(dxy, dyx);
  return scale == 0.0 || diff / scale < config.epsilon;
}

}  // namespace

void IdentifyConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(rank_rel_tol > 0.0 && rank_rel_tol < 1.0)) throw ConfigError("rank tolerance must lie in (0, 1)");
  if (k_max < 2 || k_max > kLargestOrder) {
    throw ConfigError("k_max must lie in [2, " + std::to_string(kLargestOrder) + "], got " +
                      std::to_string(k_max));
  }
  if (assumed_latents && (*assumed_latents < 0 || *assumed_latents + 2 > kLargestOrder)) {
    throw ConfigError("assumed latent count must lie in [0, " + std::to_string(kLargestOrder - 2) + "]");
  }
  if (!(independence_z >= 0.0)) throw ConfigError("independence z threshold must be >= 0");
  if (min_samples < 2) throw ConfigError("minimum sample size must be >= 2");
}

int infer_latent_count(const RankReport<double>& xy, const RankReport<double>& yx) {
  if (!xy.deficient && !yx.deficient) {
    throw ConfigError("latent count needs at least one rank-deficient cumulant matrix");
  }
  return std::max(std::min(xy.rank, yx.rank) - 1, 0);
}

InferenceResult identify_direction(const BivariateSample& sample, const IdentifyConfig& config) {
  config.validate();
  if (sample.size() < config.min_samples) {
    throw InputError("sample has " + std::to_string(sample.size()) + " rows; at least " +
                     std::to_string(config.min_samples) + " are needed for order-" +
                     std::to_string(2 * top_matrix_order(config) - 1) + " cumulants");
  }
  const BivariateSample work = config.standardize ? sample.standardized() : sample;
  if (!config.standardize &&
      (sample.x().maxCoeff() == sample.x().minCoeff() || sample.y().maxCoeff() == sample.y().minCoeff())) {
    throw InputError("constant series");
  }
  const auto moments = compute_moments(work, required_table_order(config), /*center=*/true);
  const auto cumulants = moments_to_cumulants_series(moments);
  return identify_from_cumulants(cumulants, config, &moments, sample.size());
}

InferenceResult identify_from_cumulants(const CumulantTable<double>& cumulants, const IdentifyConfig& config,
                                        const MomentTable<double>* central_moments, std::size_t sample_size) {
  config.validate();
  const int k_top = top_matrix_order(config);
  if (cumulants.order() < 2 * k_top - 1) {
    throw ConfigError("cumulant table order " + std::to_string(cumulants.order()) + " is below the required " +
                      std::to_string(2 * k_top - 1));
  }

  InferenceResult result;
  int k = config.assumed_latents ? k_top : 2;
  CumulantMatrix<double> cm_xy;
  CumulantMatrix<double> cm_yx;
  while (true) {
    cm_xy = build_cumulant_matrix(cumulants, k, Orientation::xy);
    cm_yx = build_cumulant_matrix(cumulants, k, Orientation::yx);
    RankStep step{k, matrix_rank(cm_xy, config.rank_rel_tol), matrix_rank(cm_yx, config.rank_rel_tol)};
    const bool deficient = step.xy.deficient || step.yx.deficient;
    result.trajectory.push_back(std::move(step));
    if (config.assumed_latents) {
      result.exit_reason = ExitReason::forced_order;
      break;
    }
    if (deficient) {
      result.exit_reason = ExitReason::rank_deficiency;
      break;
    }
    if (k >= config.k_max) {
      result.exit_reason = ExitReason::k_max_reached;
      break;
    }
    ++k;
  }

  const RankStep& last = result.trajectory.back();
  result.k_used = k;
  result.det_xy = matrix_abs_determinant(cm_xy);
  result.det_yx = matrix_abs_determinant(cm_yx);
  if (last.xy.deficient || last.yx.deficient) result.latent_count_min_rank = infer_latent_count(last.xy, last.yx);

  switch (result.exit_reason) {
    case ExitReason::forced_order:
      result.latent_count = *config.assumed_latents;
      break;
    case ExitReason::rank_deficiency:
      result.latent_count = k - 2;
      break;
    case ExitReason::k_max_reached:
      result.verdict = Verdict::undecided;
      return result;
  }

  if (k == 2 && central_moments != nullptr && config.independence_z > 0.0 && last.xy.rank == 1 &&
      last.yx.rank == 1) {
    result.independence = probe_independence(*central_moments, sample_size, config.independence_z);
    if (result.independence && result.independence->independent) {
      result.verdict = Verdict::conditionally_independent;
      return result;
    }
  }

  if (determinants_equal(result.det_xy, result.det_yx, config)) {
    if (last.xy.rank < last.yx.rank) {
      result.verdict = Verdict::x_causes_y;
    } else if (last.yx.rank < last.xy.rank) {
      result.verdict = Verdict::y_causes_x;
    } else {
      result.verdict = Verdict::conditionally_independent;
    }
    return result;
  }
  result.verdict = result.det_xy < result.det_yx ? Verdict::x_causes_y : Verdict::y_causes_x;
  return result;
}

Verdict swap_verdict(Verdict v) {
  switch (v) {
    case Verdict::x_causes_y:
      return Verdict::y_causes_x;
    case Verdict::y_causes_x:
      return Verdict::x_causes_y;
    default:
      return v;
  }
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::x_causes_y:
      return "x_causes_y";
    case Verdict::y_causes_x:
      return "y_causes_x";
    case Verdict::conditionally_independent:
      return "conditionally_independent";
    case Verdict::undecided:
      return "undecided";
  }
  return "undecided";
}

std::string_view to_string(ExitReason r) {
  switch (r) {
    case ExitReason::rank_deficiency:
      return "rank_deficiency";
    case ExitReason::k_max_reached:
      return "k_max_reached";
    case ExitReason::forced_order:
      return "forced_order";
  }
  return "rank_deficiency";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (Verdict v : {Verdict::x_causes_y, Verdict::y_causes_x, Verdict::conditionally_independent, Verdict::undecided}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

}  // namespace cmcausal
