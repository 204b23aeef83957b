#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmcausal/bench.hpp"
#include "cmcausal/csv_io.hpp"
#include "cmcausal/errors.hpp"
#include "cmcausal/identify.hpp"
#include "cmcausal/model.hpp"
#include "cmcausal/model_json.hpp"
#include "cmcausal/oracle_suite.hpp"
#include "cmcausal/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cmcausal;

namespace {

enum Exit { ok = 0, input_error = 2, config_error = 3, oracle_failure = 4 };

struct Overrides {
  std::optional<double> epsilon;
  std::optional<double> rank_tol;
  std::optional<int> k_max;
  std::optional<int> assume_m;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  bool no_header = false;

  void apply(IdentifyConfig& c) const {
    if (epsilon) c.epsilon = *epsilon;
    if (rank_tol) c.rank_rel_tol = *rank_tol;
    if (k_max) c.k_max = *k_max;
    if (assume_m) c.assumed_latents = *assume_m;
  }
};

json opt_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

json rank_json(const RankReport<double>& r) {
  return json{{"rank", r.rank},
              {"deficient", r.deficient},
              {"tolerance", r.tolerance_used},
              {"singular_values", std::vector<double>(r.singular_values.data(),
                                                      r.singular_values.data() + r.singular_values.size())}};
}

json result_json(const InferenceResult& r, std::size_t n, const IdentifyConfig& c) {
  json traj = json::array();
  for (const auto& s : r.trajectory) traj.push_back({{"k", s.k}, {"xy", rank_json(s.xy)}, {"yx", rank_json(s.yx)}});
  json indep = nullptr;
  if (r.independence)
    indep = {{"z21", r.independence->z21}, {"z12", r.independence->z12}, {"independent", r.independence->independent}};
  return json{{"verdict", to_string(r.verdict)},
              {"latent_count", opt_json(r.latent_count)},
              {"latent_count_min_rank", opt_json(r.latent_count_min_rank)},
              {"k_used", r.k_used},
              {"det_xy", r.det_xy},
              {"det_yx", r.det_yx},
              {"exit_reason", to_string(r.exit_reason)},
              {"n", n},
              {"config",
               {{"epsilon", c.epsilon},
                {"rank_rel_tol", c.rank_rel_tol},
                {"k_max", c.k_max},
                {"assumed_latents", opt_json(c.assumed_latents)}}},
              {"trajectory", traj},
              {"independence", indep}};
}

std::string result_text(const InferenceResult& r, std::size_t n) {
  std::ostringstream os;
  os << "verdict:      " << to_string(r.verdict) << '\n';
  os << "latent count: " << (r.latent_count ? std::to_string(*r.latent_count) : std::string("unknown")) << '\n';
  os << "k used:       " << r.k_used << " (" << to_string(r.exit_reason) << ")\n";
  os << std::setprecision(6) << std::scientific;
  os << "|det| xy:     " << r.det_xy << '\n';
  os << "|det| yx:     " << r.det_yx << '\n';
  os << "rows:         " << n << '\n';
  os << "rank trajectory:\n";
  os << "  k  rank_xy  rank_yx  sv_min/sv_max xy  sv_min/sv_max yx\n";
  auto ratio = [](const RankReport<double>& rr) {
    const auto& s = rr.singular_values;
    return s.size() == 0 || s[0] == 0.0 ? 0.0 : s[s.size() - 1] / s[0];
  };
  for (const auto& s : r.trajectory) {
    os << "  " << s.k << "  " << std::setw(7) << s.xy.rank << "  " << std::setw(7) << s.yx.rank << "  "
       << std::setw(16) << ratio(s.xy) << "  " << std::setw(16) << ratio(s.yx) << '\n';
  }
  if (r.independence)
    os << "independence z: C21 " << r.independence->z21 << ", C12 " << r.independence->z12 << '\n';
  return os.str();
}

int cmd_infer(const std::string& path, const Overrides& o) {
  IdentifyConfig config;
  o.apply(config);
  config.validate();
  BivariateSample sample = read_sample_csv(fs::path(path), o.no_header ? HeaderMode::absent : HeaderMode::detect);
  InferenceResult r = identify_direction(sample, config);
  if (o.format == "json") {
    std::cout << result_json(r, sample.size(), config).dump(2) << '\n';
  } else if (o.format == "csv") {
    std::cout << "verdict,latent_count,k_used,det_xy,det_yx,exit_reason\n" << std::setprecision(17)
              << to_string(r.verdict) << ',' << (r.latent_count ? std::to_string(*r.latent_count) : "") << ','
              << r.k_used << ',' << r.det_xy << ',' << r.det_yx << ',' << to_string(r.exit_reason) << '\n';
  } else {
    std::cout << result_text(r, sample.size());
  }
  return ok;
}

struct SimulateArgs {
  int case_id = 1;
  std::optional<int> m;
  std::vector<std::string> families;
  std::size_t n = 10000;
  std::string out;
  std::string direction = "x_to_y";
};

int cmd_simulate(const SimulateArgs& a, const Overrides& o) {
  int m = a.m.value_or(a.case_id == 1 ? 0 : a.case_id == 2 ? 1 : 2);
  std::vector<NoiseFamily> families;
  for (const auto& f : a.families) {
    auto fam = noise_family_from_string(f);
    if (!fam) throw ConfigError("unknown noise family: " + f);
    families.push_back(*fam);
  }
  if (families.empty()) families.assign(std::begin(kAllFamilies), std::end(kAllFamilies));
  SampleOptions opts;
  if (a.direction == "x_to_y") opts.direction = DirectionChoice::x_to_y;
  else if (a.direction == "y_to_x") opts.direction = DirectionChoice::y_to_x;
  else if (a.direction == "random") opts.direction = DirectionChoice::random;
  else throw ConfigError("direction must be x_to_y, y_to_x or random");

  std::uint64_t seed = o.seed.value_or(1);
  ModelSpec model = sample_model(a.case_id, m, families, derive_seed(seed, {0}), opts);
  std::uint64_t data_seed = derive_seed(seed, {1});
  BivariateSample sample = generate_data(model, a.n, data_seed);

  fs::path out(a.out);
  fs::path sidecar = out;
  sidecar.replace_extension(".model.json");
  write_sample_csv(out, sample);
  json doc = to_json(model);
  doc["n"] = a.n;
  doc["data_seed"] = data_seed;
  std::ofstream js(sidecar);
  if (!js) throw InputError("cannot write " + sidecar.string());
  js << doc.dump(2) << '\n';
  if (!js) throw InputError("write failed: " + sidecar.string());
  if (o.format == "json")
    std::cout << json{{"data", out.string()}, {"model", sidecar.string()}, {"rows", a.n}}.dump() << '\n';
  else
    std::cout << "wrote " << a.n << " rows to " << out.string() << ", model to " << sidecar.string() << '\n';
  return ok;
}

struct BenchArgs {
  std::string plan;
  bool fast = false;
  std::optional<int> replicates;
  std::optional<unsigned> threads;
  bool no_timing = false;
  std::string csv_out, json_out, md_out;
  std::vector<int> grid_true_m;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
  if (!f) throw InputError("write failed: " + path);
}

int cmd_benchmark(const BenchArgs& a, const Overrides& o) {
  BenchPlan plan;
  if (!a.plan.empty()) {
    std::ifstream in(a.plan);
    if (!in) throw InputError("cannot open " + a.plan);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("plan is not valid JSON: ") + e.what());
    }
    plan = plan_from_json(doc);
  }
  if (a.fast) {
    plan.replicates = std::min(plan.replicates, 25);
    std::vector<std::size_t> sizes;
    for (auto n : plan.sample_sizes)
      if (n <= 10000) sizes.push_back(n);
    plan.sample_sizes = sizes.empty() ? std::vector<std::size_t>{5000, 10000} : sizes;
  }
  if (a.replicates) plan.replicates = *a.replicates;
  if (a.threads) plan.threads = *a.threads;
  if (a.no_timing) plan.record_timing = false;
  if (o.seed) plan.seed = *o.seed;
  o.apply(plan.identify);

  BenchReport report;
  if (!a.grid_true_m.empty()) {
    std::vector<int> an = plan.assumed_counts.empty() ? std::vector<int>{0, 1, 2, 3, 4} : plan.assumed_counts;
    IdentifyConfig config = plan.identify;
    config.assumed_latents.reset();
    report = run_assumed_grid(a.grid_true_m, an, plan.sample_sizes.front(), plan.replicates, plan.seed,
                              plan.families, config, plan.threads, plan.record_timing);
  } else {
    report = run_benchmark(plan);
  }

  if (!a.csv_out.empty()) write_file(a.csv_out, emit_report(report, ReportFormat::csv));
  if (!a.json_out.empty()) write_file(a.json_out, emit_report(report, ReportFormat::json));
  if (!a.md_out.empty()) write_file(a.md_out, emit_report(report, ReportFormat::markdown));
  ReportFormat f = o.format == "json"  ? ReportFormat::json
                   : o.format == "csv" ? ReportFormat::csv
                                       : ReportFormat::markdown;
  std::cout << emit_report(report, f);
  return ok;
}

struct OracleArgs {
  int m_min = 0;
  int m_max = 4;
  int models = 100;
  bool inject_zero_beta = false;
};

int cmd_oracle_check(const OracleArgs& a, const Overrides& o) {
  OracleSuiteOptions opts;
  opts.m_min = a.m_min;
  opts.m_max = a.m_max;
  opts.models_per_m = a.models;
  opts.inject_zero_beta = a.inject_zero_beta;
  if (o.seed) opts.seed = *o.seed;
  if (opts.m_min < 0 || opts.m_max < opts.m_min || opts.m_max > 5)
    throw ConfigError("oracle m range must satisfy 0 <= m-min <= m-max <= 5");
  if (opts.models_per_m < 1) throw ConfigError("--models must be >= 1");
  OracleSuiteReport r = run_oracle_suite(opts);
  if (o.format == "json") {
    json fails = json::array();
    for (const auto& f : r.failures) fails.push_back({{"m", f.m}, {"model", f.model_index}, {"what", f.what}});
    std::cout << json{{"passed", r.passed()},
                      {"models_checked", r.models_checked},
                      {"min_effect_det", r.min_effect_det},
                      {"max_cause_det", r.max_cause_det},
                      {"failures", fails}}
                     .dump(2)
              << '\n';
  } else {
    for (const auto& f : r.failures) std::cout << "FAIL m=" << f.m << " model " << f.model_index << ": " << f.what << '\n';
    std::cout << (r.passed() ? "PASS" : "FAIL") << ": " << r.models_checked << " models, m in [" << a.m_min << ", "
              << a.m_max << "], " << r.failures.size() << " failed checks; min effect |det| " << r.min_effect_det
              << ", max cause |det| " << r.max_cause_det << '\n';
  }
  return r.passed() ? ok : oracle_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal direction between two variables under latent confounding, from cumulant matrix ranks"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Overrides o;
  app.add_option("--epsilon", o.epsilon, "Determinant equality threshold")->envname("CMCAUSAL_EPSILON");
  app.add_option("--rank-tol", o.rank_tol, "Relative singular value threshold for rank")
      ->envname("CMCAUSAL_RANK_TOL");
  app.add_option("--k-max", o.k_max, "Largest cumulant matrix size tried")->envname("CMCAUSAL_K_MAX");
  app.add_option("--assume-m", o.assume_m, "Assume this many latent confounders (k = m + 2)")
      ->envname("CMCAUSAL_ASSUME_M");
  app.add_option("--seed", o.seed, "Random seed")->envname("CMCAUSAL_SEED");
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "text", "csv"}))
      ->envname("CMCAUSAL_FORMAT");
  app.add_flag("--no-header", o.no_header, "Input CSV has no header line")->envname("CMCAUSAL_NO_HEADER");

  std::string infer_path;
  auto* infer = app.add_subcommand("infer", "Infer the causal direction from a two-column CSV");
  infer->add_option("csv", infer_path, "Input CSV")->required();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset and its model sidecar");
  simulate->add_option("--case", sim.case_id, "Simulation case")->check(CLI::Range(1, 3));
  simulate->add_option("--m", sim.m, "Latent count (default 0, 1, 2 for cases 1, 2, 3)");
  simulate->add_option("--family", sim.families, "Noise family (repeatable or comma-separated; default all five)")
      ->delimiter(',');
  simulate->add_option("--n", sim.n, "Rows")->check(CLI::PositiveNumber);
  simulate->add_option("--direction", sim.direction, "x_to_y, y_to_x or random");
  simulate->add_option("-o,--out", sim.out, "Output CSV path")->required();

  BenchArgs bench;
  auto* benchmark = app.add_subcommand("benchmark", "Run a simulation study");
  benchmark->add_option("--plan", bench.plan, "Plan JSON (default: full three-case study)");
  benchmark->add_flag("--fast", bench.fast, "At most 25 replicates and n <= 10000");
  benchmark->add_option("--replicates", bench.replicates, "Override replicates per cell");
  benchmark->add_option("--threads", bench.threads, "Worker threads (0: all cores)");
  benchmark->add_flag("--no-timing", bench.no_timing, "Omit wall-clock runtimes (reproducible output)");
  benchmark->add_option("--csv", bench.csv_out, "Write CSV report");
  benchmark->add_option("--json", bench.json_out, "Write JSON report");
  benchmark->add_option("--markdown", bench.md_out, "Write markdown table");
  benchmark->add_option("--grid-true-m", bench.grid_true_m,
                        "Assumed-count grid over these true latent counts (first sample size of the plan)")
      ->delimiter(',');

  OracleArgs oracle;
  auto* oracle_check = app.add_subcommand("oracle-check", "Exact rank and determinant checks on population models");
  oracle_check->add_option("--m-min", oracle.m_min, "Smallest latent count");
  oracle_check->add_option("--m-max", oracle.m_max, "Largest latent count");
  oracle_check->add_option("--models", oracle.models, "Models per latent count");
  oracle_check->add_flag("--inject-zero-beta", oracle.inject_zero_beta,
                         "Zero the effect of one latent on Y (the checks should fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (*infer) return cmd_infer(infer_path, o);
    if (*simulate) return cmd_simulate(sim, o);
    if (*benchmark) return cmd_benchmark(bench, o);
    if (*oracle_check) return cmd_oracle_check(oracle, o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  }
  return ok;
}
