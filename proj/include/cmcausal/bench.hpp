#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmcausal/identify.hpp"
#include "cmcausal/model.hpp"

namespace cmcausal {

/// Simulation study description. Each (case, family, n, m[, assumed m])
/// combination is one cell of `replicates` independent model + dataset
/// draws. Latent counts apply to case 3 only; cases 1 and 2 use m = 0 and 1.
struct BenchPlan {
  std::vector<int> cases{1, 2, 3};
  std::vector<NoiseFamily> families{std::begin(kAllFamilies), std::end(kAllFamilies)};
  std::vector<std::size_t> sample_sizes{5000, 10000, 50000};
  int replicates = 100;
  std::vector<int> latent_counts{2};
  /// When non-empty, every cell is evaluated at each forced order
  /// k = assumed + 2 instead of running the rank loop.
  std::vector<int> assumed_counts;
  std::uint64_t seed = 1;
  IdentifyConfig identify;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Wall-clock timing makes reports run-dependent; disable for
  /// byte-identical output.
  bool record_timing = true;

  void validate() const;
};

struct BenchCell {
  int case_id = 0;
  std::string family;  // family name, or "mixed" when replicates cycle families
  std::size_t n = 0;
  int true_m = 0;
  std::optional<int> assumed_m;
  int replicates = 0;
  int correct = 0;
  int x_causes_y = 0;
  int y_causes_x = 0;
  int independent = 0;
  int undecided = 0;
  int failed = 0;  // replicates that threw; also counted as undecided
  double mean_runtime_ms = 0.0;

  double accuracy() const { return replicates == 0 ? 0.0 : static_cast<double>(correct) / replicates; }
  bool operator==(const BenchCell&) const = default;
};

struct BenchReport {
  std::vector<BenchCell> cells;
  nlohmann::json config;

  bool operator==(const BenchReport& other) const { return cells == other.cells && config == other.config; }
};

BenchReport run_benchmark(const BenchPlan& plan);

/// Forced-order grid: for every true latent count and assumed count, the
/// same `replicates` datasets (families cycled across replicates) are
/// scored with k = assumed + 2.
BenchReport run_assumed_grid(const std::vector<int>& true_m, const std::vector<int>& assumed_m, std::size_t n,
                             int replicates, std::uint64_t seed,
                             const std::vector<NoiseFamily>& families = {std::begin(kAllFamilies),
                                                                         std::end(kAllFamilies)},
                             const IdentifyConfig& identify = {}, unsigned threads = 0, bool record_timing = true);

/// correct / total over the cells selected by `select`.
double pooled_accuracy(const BenchReport& report, const std::function<bool(const BenchCell&)>& select);

enum class ReportFormat { csv, json, markdown };

std::optional<ReportFormat> report_format_from_string(const std::string& s);

std::string emit_report(const BenchReport& report, ReportFormat format);

BenchReport report_from_json(const nlohmann::json& doc);

/// Parses a plan document; unknown keys are rejected.
BenchPlan plan_from_json(const nlohmann::json& doc);
nlohmann::json plan_to_json(const BenchPlan& plan);

}  // namespace cmcausal
