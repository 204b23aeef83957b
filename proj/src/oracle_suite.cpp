#include "cmcausal/oracle_suite.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "cmcausal/cumulant_matrix.hpp"
#include "cmcausal/errors.hpp"
#include "cmcausal/identify.hpp"
#include "cmcausal/rng.hpp"

namespace cmcausal {

namespace {

std::string describe(const std::string& label, double value) {
  std::ostringstream os;
  os << label << " = " << value;
  return os.str();
}

ModelSpec with_zero_beta(const ModelSpec& model) {
  std::vector<double> alpha, beta;
  for (int i = 0; i < model.latent_count(); ++i) {
    alpha.push_back(model.alpha(i));
    beta.push_back(i == 0 ? 0.0 : model.beta(i));
  }
  ModelSpec out = ModelSpec::from_path_coefficients(model.direction, model.gamma, alpha, beta, model.noise_x,
                                                    model.noise_y, model.noise_latent);
  out.seed = model.seed;
  return out;
}

}  // namespace

std::vector<std::string> check_population_model(const ModelSpec& model, const OracleSuiteOptions& options,
                                                double* cause_det, double* effect_det) {
  std::vector<std::string> failures;
  const int m = model.latent_count();
  const int k = m + 2;
  const int top = options.check_next_order ? k + 1 : k;
  const auto table = population_cumulants(model, 2 * top - 1);

  const auto xy = build_cumulant_matrix(table, k, Orientation::xy);
  const auto yx = build_cumulant_matrix(table, k, Orientation::yx);
  const auto rxy = matrix_rank(xy, options.rank_rel_tol);
  const auto ryx = matrix_rank(yx, options.rank_rel_tol);
  if (rxy.rank != m + 1) failures.push_back("rank(CM_xy) at k=" + std::to_string(k) + " is " + std::to_string(rxy.rank) + ", expected " + std::to_string(m + 1));
  if (ryx.rank != m + 2) failures.push_back("rank(CM_yx) at k=" + std::to_string(k) + " is " + std::to_string(ryx.rank) + ", expected " + std::to_string(m + 2));
  if ((rxy.deficient || ryx.deficient) && infer_latent_count(rxy, ryx) != m) {
    failures.push_back("latent count from ranks is " + std::to_string(infer_latent_count(rxy, ryx)));
  }

  const double dxy = matrix_abs_determinant(xy);
  const double dyx = matrix_abs_determinant(yx);
  if (cause_det) *cause_det = dxy;
  if (effect_det) *effect_det = dyx;
  if (!(dxy < options.cause_det_max)) failures.push_back(describe("cause-side |det|", dxy));
  if (!(dyx > options.effect_det_min)) failures.push_back(describe("effect-side |det|", dyx));

  IdentifyConfig config;
  config.rank_rel_tol = options.rank_rel_tol;
  config.k_max = std::clamp(top, 2, 8);
  const auto loop = identify_from_cumulants(table, config);
  if (loop.verdict != Verdict::x_causes_y) failures.push_back("verdict is " + std::string(to_string(loop.verdict)));
  if (loop.k_used != k) failures.push_back("loop stopped at k=" + std::to_string(loop.k_used));
  if (loop.latent_count != m) failures.push_back("inferred latent count differs from " + std::to_string(m));

  const auto mirrored = identify_from_cumulants(table.swapped(), config);
  if (mirrored.verdict != Verdict::y_causes_x) {
    failures.push_back("swapped verdict is " + std::string(to_string(mirrored.verdict)));
  }

  if (options.check_next_order) {
    const auto rxy2 = matrix_rank(build_cumulant_matrix(table, top, Orientation::xy), options.rank_rel_tol);
    const auto ryx2 = matrix_rank(build_cumulant_matrix(table, top, Orientation::yx), options.rank_rel_tol);
    if (rxy2.rank != m + 1 || ryx2.rank != m + 2) {
      failures.push_back("ranks at k=" + std::to_string(top) + " are (" + std::to_string(rxy2.rank) + ", " +
                         std::to_string(ryx2.rank) + ")");
    }
    IdentifyConfig forced = config;
    forced.assumed_latents = m + 1;
    const auto next = identify_from_cumulants(table, forced);
    if (next.verdict != Verdict::x_causes_y) {
      failures.push_back("verdict at k=" + std::to_string(top) + " is " + std::string(to_string(next.verdict)));
    }
    if (next.latent_count_min_rank != m) failures.push_back("latent count from ranks at k=" + std::to_string(top) + " differs");
  }
  return failures;
}

OracleSuiteReport run_oracle_suite(const OracleSuiteOptions& options) {
  if (options.m_min < 0 || options.m_max < options.m_min || options.m_max > 5) {
    throw ConfigError("oracle suite latent range must satisfy 0 <= m_min <= m_max <= 5");
  }
  if (options.models_per_m < 1) throw ConfigError("oracle suite needs at least one model per latent count");

  OracleSuiteReport report;
  report.min_effect_det = std::numeric_limits<double>::infinity();
  report.max_cause_det = 0.0;
  OracleModelOptions model_options = options.model_options;
  model_options.direction = DirectionChoice::x_to_y;
  model_options.max_order = std::max(model_options.max_order, 2 * (options.m_max + 3) - 1);

  for (int m = options.m_min; m <= options.m_max; ++m) {
    int count = 0;
    for (int i = 0; i < options.models_per_m; ++i) {
      ModelSpec model = sample_oracle_model(m, derive_seed(options.seed, {static_cast<std::uint64_t>(m),
                                                                          static_cast<std::uint64_t>(i)}),
                                            model_options);
      if (options.inject_zero_beta && m >= 1) model = with_zero_beta(model);
      double cause = 0.0, effect = 0.0;
      for (auto& what : check_population_model(model, options, &cause, &effect)) {
        report.failures.push_back({m, i, std::move(what)});
      }
      report.min_effect_det = std::min(report.min_effect_det, effect);
      report.max_cause_det = std::max(report.max_cause_det, cause);
      ++count;
      ++report.models_checked;
    }
    report.models_per_m.push_back(count);
  }
  return report;
}

}  // namespace cmcausal
