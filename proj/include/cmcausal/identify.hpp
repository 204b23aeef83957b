#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cmcausal/cumulant_matrix.hpp"
#include "cmcausal/cumulants.hpp"
#include "cmcausal/moments.hpp"
#include "cmcausal/sample.hpp"

namespace cmcausal {

enum class Verdict { x_causes_y, y_causes_x, conditionally_independent, undecided };

enum class EpsilonMode {
  absolute,  // |det_xy - det_yx| < epsilon
  relative,  // |det_xy - det_yx| / max(det_xy, det_yx) < epsilon
};

enum class ExitReason { rank_deficiency, k_max_reached, forced_order };

struct IdentifyConfig {
  double epsilon = 1e-5;
  EpsilonMode epsilon_mode = EpsilonMode::absolute;
  double rank_rel_tol = 0.05;
  int k_max = 6;
  bool standardize = true;
  /// Skip the rank loop and evaluate k = assumed_latents + 2 directly.
  std::optional<int> assumed_latents;
  std::size_t min_samples = 500;
  /// z threshold of the mixed third-order cumulant test applied when the
  /// loop stops at k = 2 with both matrices of rank 1. Zero disables it.
  double independence_z = 3.0;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

struct RankStep {
  int k = 0;
  RankReport<double> xy;
  RankReport<double> yx;
};

/// z scores of C(2,1) and C(1,2) against their standard errors under
/// independence of x and y.
struct IndependenceProbe {
  double z21 = 0.0;
  double z12 = 0.0;
  bool independent = false;
};

struct InferenceResult {
  Verdict verdict = Verdict::undecided;
  /// k_used - 2 after a rank-deficient exit, or the assumed count in forced
  /// mode; empty when the loop ran out of orders.
  std::optional<int> latent_count;
  /// min(rank_xy, rank_yx) - 1 at k_used, when either matrix is deficient.
  std::optional<int> latent_count_min_rank;
  int k_used = 0;
  double det_xy = 0.0;
  double det_yx = 0.0;
  ExitReason exit_reason = ExitReason::rank_deficiency;
  std::vector<RankStep> trajectory;
  std::optional<IndependenceProbe> independence;
};

/// Latent count from a pair of rank reports: min(rank) - 1, floored at 0.
/// Throws ConfigError if neither report is deficient.
int infer_latent_count(const RankReport<double>& xy, const RankReport<double>& yx);

/// Direction test on raw data. Estimates joint cumulants up to the highest
/// order the configuration can reach, then runs the decision procedure.
InferenceResult identify_direction(const BivariateSample& sample, const IdentifyConfig& config);

/// Decision procedure on a ready cumulant table, e.g. exact population
/// cumulants. `central_moments`, when given, enables the k = 2
/// independence probe (needs moments up to order 4).
InferenceResult identify_from_cumulants(const CumulantTable<double>& cumulants, const IdentifyConfig& config,
                                        const MomentTable<double>* central_moments = nullptr,
                                        std::size_t sample_size = 0);

/// The verdict for the same data with x and y exchanged.
Verdict swap_verdict(Verdict v);

std::string_view to_string(Verdict v);
std::string_view to_string(ExitReason r);
std::optional<Verdict> verdict_from_string(std::string_view s);

}  // namespace cmcausal
