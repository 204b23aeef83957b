#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmcausal/model.hpp"

namespace cmcausal {

/// Exact checks of the rank and determinant statements on population
/// cumulant matrices of random cumulant-only models with X -> Y.
struct OracleSuiteOptions {
  int m_min = 0;
  int m_max = 4;
  int models_per_m = 100;
  std::uint64_t seed = 1;
  double rank_rel_tol = 1e-8;
  double cause_det_max = 1e-8;
  double effect_det_min = 1e-6;
  /// Also check k = m + 3.
  bool check_next_order = true;
  /// Zero the total effect of latent 0 on Y (models with m >= 1), breaking
  /// irreducibility. Used to show the checks are sensitive to it.
  bool inject_zero_beta = false;
  OracleModelOptions model_options;
};

struct OracleCheckFailure {
  int m = 0;
  int model_index = 0;
  std::string what;
};

struct OracleSuiteReport {
  int models_checked = 0;
  std::vector<int> models_per_m;  // indexed by m - m_min
  std::vector<OracleCheckFailure> failures;
  /// Smallest effect-side and largest cause-side |det| at k = m + 2.
  double min_effect_det = 0.0;
  double max_cause_det = 0.0;

  bool passed() const { return failures.empty(); }
};

OracleSuiteReport run_oracle_suite(const OracleSuiteOptions& options);

/// All failed checks for one model (empty when it passes).
std::vector<std::string> check_population_model(const ModelSpec& model, const OracleSuiteOptions& options,
                                                double* cause_det = nullptr, double* effect_det = nullptr);

}  // namespace cmcausal
