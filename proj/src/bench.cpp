#include "cmcausal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "cmcausal/errors.hpp"
#include "cmcausal/rng.hpp"

namespace cmcausal {

namespace {

using nlohmann::json;

constexpr std::uint64_t kBenchTag = 0x62656e6368ULL;
constexpr std::uint64_t kGridTag = 0x67726964ULL;

struct Outcome {
  Verdict verdict = Verdict::undecided;
  bool truth_x_to_y = true;
  bool failed = false;
  double ms = 0.0;
};

unsigned worker_count(unsigned requested, int tasks) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return std::min<unsigned>(n, static_cast<unsigned>(std::max(tasks, 1)));
}

template <typename Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) fn(i);
  };
  unsigned workers = worker_count(threads, count);
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
}

Outcome run_replicate(int case_id, int m, std::span<const NoiseFamily> families, std::size_t n,
                      std::uint64_t model_seed, std::uint64_t data_seed, const IdentifyConfig& config,
                      bool timing) {
  Outcome out;
  try {
    ModelSpec model = sample_model(case_id, m, families, model_seed);
    out.truth_x_to_y = model.direction == Direction::x_to_y;
    BivariateSample sample = generate_data(model, n, data_seed);
    auto t0 = std::chrono::steady_clock::now();
    out.verdict = identify_direction(sample, config).verdict;
    if (timing)
      out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  } catch (const std::exception&) {
    out.verdict = Verdict::undecided;
    out.failed = true;
  }
  return out;
}

void tally(BenchCell& cell, const std::vector<Outcome>& outcomes, bool timing) {
  double total_ms = 0.0;
  cell.replicates = static_cast<int>(outcomes.size());
  for (const auto& o : outcomes) {
    switch (o.verdict) {
      case Verdict::x_causes_y: ++cell.x_causes_y; break;
      case Verdict::y_causes_x: ++cell.y_causes_x; break;
      case Verdict::conditionally_independent: ++cell.independent; break;
      case Verdict::undecided: ++cell.undecided; break;
    }
    Verdict want = o.truth_x_to_y ? Verdict::x_causes_y : Verdict::y_causes_x;
    if (o.verdict == want) ++cell.correct;
    if (o.failed) ++cell.failed;
    total_ms += o.ms;
  }
  cell.mean_runtime_ms = timing && !outcomes.empty() ? total_ms / outcomes.size() : 0.0;
}

json identify_to_json(const IdentifyConfig& c) {
  json j{{"epsilon", c.epsilon},
         {"epsilon_mode", c.epsilon_mode == EpsilonMode::absolute ? "absolute" : "relative"},
         {"rank_rel_tol", c.rank_rel_tol},
         {"k_max", c.k_max},
         {"standardize", c.standardize},
         {"min_samples", c.min_samples},
         {"independence_z", c.independence_z}};
  j["assumed_latents"] = c.assumed_latents ? json(*c.assumed_latents) : json(nullptr);
  return j;
}

IdentifyConfig identify_from_json(const json& j) {
  IdentifyConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "epsilon") c.epsilon = v.get<double>();
    else if (key == "epsilon_mode") {
      auto s = v.get<std::string>();
      if (s == "absolute") c.epsilon_mode = EpsilonMode::absolute;
      else if (s == "relative") c.epsilon_mode = EpsilonMode::relative;
      else throw ConfigError("unknown epsilon_mode: " + s);
    } else if (key == "rank_rel_tol") c.rank_rel_tol = v.get<double>();
    else if (key == "k_max") c.k_max = v.get<int>();
    else if (key == "standardize") c.standardize = v.get<bool>();
    else if (key == "min_samples") c.min_samples = v.get<std::size_t>();
    else if (key == "independence_z") c.independence_z = v.get<double>();
    else if (key == "assumed_latents") {
      if (!v.is_null()) c.assumed_latents = v.get<int>();
    } else
      throw ConfigError("unknown identify key: " + key);
  }
  return c;
}

std::vector<std::string> family_names(const std::vector<NoiseFamily>& fs) {
  std::vector<std::string> out;
  for (auto f : fs) out.emplace_back(to_string(f));
  return out;
}

std::vector<NoiseFamily> families_from_json(const json& j) {
  std::vector<NoiseFamily> out;
  for (const auto& v : j) {
    auto f = noise_family_from_string(v.get<std::string>());
    if (!f) throw ConfigError("unknown noise family: " + v.get<std::string>());
    out.push_back(*f);
  }
  return out;
}

std::string shortest(double v) {
  char buf[32];
  auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

std::string fmt(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::string cell_label(int case_id, int m) {
  if (case_id == 3) return "Case 3 (m=" + std::to_string(m) + ")";
  return "Case " + std::to_string(case_id);
}

std::string markdown_table1(const BenchReport& r) {
  std::vector<std::pair<int, int>> cols;  // (case, m)
  std::vector<std::pair<std::string, std::size_t>> rows;
  std::map<std::tuple<std::string, std::size_t, int, int>, const BenchCell*> lookup;
  for (const auto& c : r.cells) {
    std::pair<int, int> col{c.case_id, c.true_m};
    if (std::find(cols.begin(), cols.end(), col) == cols.end()) cols.push_back(col);
    std::pair<std::string, std::size_t> row{c.family, c.n};
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    lookup[{c.family, c.n, c.case_id, c.true_m}] = &c;
  }
  std::sort(cols.begin(), cols.end());
  std::ostringstream os;
  os << "| Noise | N |";
  for (auto [cs, m] : cols) os << ' ' << cell_label(cs, m) << " |";
  os << "\n|---|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& [fam, n] : rows) {
    os << "| " << fam << " | " << n << " |";
    for (auto [cs, m] : cols) {
      auto it = lookup.find({fam, n, cs, m});
      os << ' ' << (it == lookup.end() ? "-" : fmt(it->second->accuracy(), 2)) << " |";
    }
    os << '\n';
  }
  return os.str();
}

std::string markdown_grid(const BenchReport& r) {
  std::set<int> ans;
  std::vector<std::tuple<std::string, std::size_t, int>> rows;  // family, n, TN
  std::map<std::tuple<std::string, std::size_t, int, int>, const BenchCell*> lookup;
  for (const auto& c : r.cells) {
    int an = c.assumed_m.value_or(-1);
    ans.insert(an);
    std::tuple<std::string, std::size_t, int> row{c.family, c.n, c.true_m};
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    lookup[{c.family, c.n, c.true_m, an}] = &c;
  }
  std::ostringstream os;
  os << "| Noise | N | TN |";
  for (int an : ans) os << (an < 0 ? std::string(" loop |") : " AN=" + std::to_string(an) + " |");
  os << "\n|---|---|---|";
  for (std::size_t i = 0; i < ans.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& [fam, n, tn] : rows) {
    os << "| " << fam << " | " << n << " | " << tn << " |";
    for (int an : ans) {
      auto it = lookup.find({fam, n, tn, an});
      os << ' ' << (it == lookup.end() ? "-" : fmt(it->second->accuracy(), 2)) << " |";
    }
    os << '\n';
  }
  return os.str();
}

json cell_to_json(const BenchCell& c) {
  return json{{"case", c.case_id},
              {"family", c.family},
              {"n", c.n},
              {"true_m", c.true_m},
              {"assumed_m", c.assumed_m ? json(*c.assumed_m) : json(nullptr)},
              {"replicates", c.replicates},
              {"correct", c.correct},
              {"accuracy", c.accuracy()},
              {"x_causes_y", c.x_causes_y},
              {"y_causes_x", c.y_causes_x},
              {"conditionally_independent", c.independent},
              {"undecided", c.undecided},
              {"failed", c.failed},
              {"mean_runtime_ms", c.mean_runtime_ms}};
}

BenchCell cell_from_json(const json& j) {
  BenchCell c;
  c.case_id = j.at("case").get<int>();
  c.family = j.at("family").get<std::string>();
  c.n = j.at("n").get<std::size_t>();
  c.true_m = j.at("true_m").get<int>();
  if (!j.at("assumed_m").is_null()) c.assumed_m = j.at("assumed_m").get<int>();
  c.replicates = j.at("replicates").get<int>();
  c.correct = j.at("correct").get<int>();
  c.x_causes_y = j.at("x_causes_y").get<int>();
  c.y_causes_x = j.at("y_causes_x").get<int>();
  c.independent = j.at("conditionally_independent").get<int>();
  c.undecided = j.at("undecided").get<int>();
  c.failed = j.value("failed", 0);
  c.mean_runtime_ms = j.at("mean_runtime_ms").get<double>();
  return c;
}

}  // namespace

void BenchPlan::validate() const {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (cases.empty()) throw ConfigError("plan needs at least one case");
  if (families.empty()) throw ConfigError("plan needs at least one noise family");
  if (sample_sizes.empty()) throw ConfigError("plan needs at least one sample size");
  for (int c : cases)
    if (c < 1 || c > 3) throw ConfigError("case must be 1, 2 or 3");
  for (auto n : sample_sizes)
    if (n < 500) throw ConfigError("sample sizes must be >= 500");
  if (std::find(cases.begin(), cases.end(), 3) != cases.end()) {
    if (latent_counts.empty()) throw ConfigError("case 3 needs latent_counts");
    for (int m : latent_counts)
      if (m < 2 || m > 6) throw ConfigError("case 3 latent counts must lie in [2, 6]");
  }
  for (int a : assumed_counts)
    if (a < 0) throw ConfigError("assumed counts must be >= 0");
  IdentifyConfig probe = identify;
  for (int a : assumed_counts) {
    probe.assumed_latents = a;
    probe.validate();
  }
  identify.validate();
}

BenchReport run_benchmark(const BenchPlan& plan) {
  plan.validate();
  BenchReport report;
  report.config = plan_to_json(plan);

  std::vector<std::optional<int>> forced;
  if (plan.assumed_counts.empty()) forced.push_back(plan.identify.assumed_latents);
  else
    for (int a : plan.assumed_counts) forced.emplace_back(a);

  for (int case_id : plan.cases) {
    std::vector<int> ms = case_id == 1 ? std::vector<int>{0} : case_id == 2 ? std::vector<int>{1} : plan.latent_counts;
    for (int m : ms)
      for (NoiseFamily fam : plan.families)
        for (std::size_t n : plan.sample_sizes)
          for (const auto& assumed : forced) {
            IdentifyConfig config = plan.identify;
            config.assumed_latents = assumed;
            const NoiseFamily one[] = {fam};
            std::vector<Outcome> outcomes(plan.replicates);
            parallel_for(plan.replicates, plan.threads, [&](int r) {
              std::uint64_t base =
                  derive_seed(plan.seed, {kBenchTag, std::uint64_t(case_id), std::uint64_t(m),
                                          std::uint64_t(fam), std::uint64_t(n), std::uint64_t(r)});
              outcomes[r] = run_replicate(case_id, m, one, n, derive_seed(base, {0}), derive_seed(base, {1}), config,
                                          plan.record_timing);
            });
            BenchCell cell;
            cell.case_id = case_id;
            cell.family = std::string(to_string(fam));
            cell.n = n;
            cell.true_m = m;
            cell.assumed_m = assumed;
            tally(cell, outcomes, plan.record_timing);
            report.cells.push_back(std::move(cell));
          }
  }
  return report;
}

BenchReport run_assumed_grid(const std::vector<int>& true_m, const std::vector<int>& assumed_m, std::size_t n,
                             int replicates, std::uint64_t seed, const std::vector<NoiseFamily>& families,
                             const IdentifyConfig& identify, unsigned threads, bool record_timing) {
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (n < 500) throw ConfigError("sample sizes must be >= 500");
  if (families.empty()) throw ConfigError("grid needs at least one noise family");
  for (int tn : true_m)
    if (tn < 0 || tn > 6) throw ConfigError("true latent counts must lie in [0, 6]");
  for (int an : assumed_m) {
    IdentifyConfig probe = identify;
    probe.assumed_latents = an;
    probe.validate();
  }

  BenchReport report;
  report.config = json{{"grid", true},
                       {"true_m", true_m},
                       {"assumed_m", assumed_m},
                       {"n", n},
                       {"replicates", replicates},
                       {"seed", seed},
                       {"families", family_names(families)},
                       {"record_timing", record_timing},
                       {"identify", identify_to_json(identify)}};

  for (int tn : true_m) {
    int case_id = case_for_latent_count(tn);
    std::vector<std::optional<BivariateSample>> data(replicates);
    std::vector<char> truth(replicates, 1);
    parallel_for(replicates, threads, [&](int r) {
      std::uint64_t base = derive_seed(seed, {kGridTag, std::uint64_t(tn), std::uint64_t(n), std::uint64_t(r)});
      const NoiseFamily fam[] = {families[r % families.size()]};
      try {
        ModelSpec model = sample_model(case_id, tn, fam, derive_seed(base, {0}));
        truth[r] = model.direction == Direction::x_to_y;
        data[r] = generate_data(model, n, derive_seed(base, {1}));
      } catch (const std::exception&) {
        data[r].reset();
      }
    });
    for (int an : assumed_m) {
      IdentifyConfig config = identify;
      config.assumed_latents = an;
      std::vector<Outcome> outcomes(replicates);
      parallel_for(replicates, threads, [&](int r) {
        Outcome& o = outcomes[r];
        o.truth_x_to_y = truth[r];
        if (!data[r]) {
          o.failed = true;
          return;
        }
        try {
          auto t0 = std::chrono::steady_clock::now();
          o.verdict = identify_direction(*data[r], config).verdict;
          if (record_timing)
            o.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        } catch (const std::exception&) {
          o.verdict = Verdict::undecided;
          o.failed = true;
        }
      });
      BenchCell cell;
      cell.case_id = case_id;
      cell.family = families.size() == 1 ? std::string(to_string(families[0])) : "mixed";
      cell.n = n;
      cell.true_m = tn;
      cell.assumed_m = an;
      tally(cell, outcomes, record_timing);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

double pooled_accuracy(const BenchReport& report, const std::function<bool(const BenchCell&)>& select) {
  long correct = 0, total = 0;
  for (const auto& c : report.cells)
    if (select(c)) {
      correct += c.correct;
      total += c.replicates;
    }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

std::optional<ReportFormat> report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  return std::nullopt;
}

std::string emit_report(const BenchReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: {
      json doc{{"config", report.config}, {"cells", json::array()}};
      for (const auto& c : report.cells) doc["cells"].push_back(cell_to_json(c));
      return doc.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::ostringstream os;
      os << "case,family,n,true_m,assumed_m,replicates,correct,accuracy,x_causes_y,y_causes_x,"
            "conditionally_independent,undecided,failed,mean_runtime_ms\n";
      for (const auto& c : report.cells) {
        os << c.case_id << ',' << c.family << ',' << c.n << ',' << c.true_m << ',';
        if (c.assumed_m) os << *c.assumed_m;
        os << ',' << c.replicates << ',' << c.correct << ',' << shortest(c.accuracy()) << ',' << c.x_causes_y << ','
           << c.y_causes_x << ',' << c.independent << ',' << c.undecided << ',' << c.failed << ','
           << shortest(c.mean_runtime_ms) << '\n';
      }
      return os.str();
    }
    case ReportFormat::markdown: {
      bool grid = std::any_of(report.cells.begin(), report.cells.end(),
                              [](const BenchCell& c) { return c.assumed_m.has_value(); });
      return grid ? markdown_grid(report) : markdown_table1(report);
    }
  }
  throw ConfigError("unsupported report format");
}

BenchReport report_from_json(const json& doc) {
  try {
    BenchReport r;
    r.config = doc.at("config");
    for (const auto& c : doc.at("cells")) r.cells.push_back(cell_from_json(c));
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

json plan_to_json(const BenchPlan& p) {
  return json{{"cases", p.cases},
              {"families", family_names(p.families)},
              {"sample_sizes", p.sample_sizes},
              {"replicates", p.replicates},
              {"latent_counts", p.latent_counts},
              {"assumed_counts", p.assumed_counts},
              {"seed", p.seed},
              {"threads", p.threads},
              {"record_timing", p.record_timing},
              {"identify", identify_to_json(p.identify)}};
}

BenchPlan plan_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("plan must be a JSON object");
  BenchPlan p;
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& key = it.key();
      const json& v = it.value();
      if (key == "cases") p.cases = v.get<std::vector<int>>();
      else if (key == "families") p.families = families_from_json(v);
      else if (key == "sample_sizes") p.sample_sizes = v.get<std::vector<std::size_t>>();
      else if (key == "replicates") p.replicates = v.get<int>();
      else if (key == "latent_counts") p.latent_counts = v.get<std::vector<int>>();
      else if (key == "assumed_counts") p.assumed_counts = v.get<std::vector<int>>();
      else if (key == "seed") p.seed = v.get<std::uint64_t>();
      else if (key == "threads") p.threads = v.get<unsigned>();
      else if (key == "record_timing") p.record_timing = v.get<bool>();
      else if (key == "identify") p.identify = identify_from_json(v);
      else throw ConfigError("unknown plan key: " + key);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed plan: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace cmcausal
