#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "cmcausal/model.hpp"
#include "cmcausal/model_json.hpp"
#include "cmcausal/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(CMCAUSAL_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "cmcausal_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("simulate writes rows and a sidecar, reproducibly") {
  auto a = scratch("sim_a.csv"), b = scratch("sim_b.csv");
  auto r1 = run("--seed 5 simulate --case 2 --n 1000 -o " + a.string());
  REQUIRE(r1.code == 0);
  REQUIRE(run("--seed 5 simulate --case 2 --n 1000 -o " + b.string()).code == 0);
  auto text = slurp(a);
  CHECK(count_lines(text) == 1001);
  CHECK(text == slurp(b));
  auto sa = fs::path(a).replace_extension(".model.json");
  auto sb = fs::path(b).replace_extension(".model.json");
  CHECK(slurp(sa) == slurp(sb));
  auto side = json::parse(slurp(sa));
  CHECK(side["latent_count"] == 1);
  CHECK(side["case"] == 2);
}

TEST_CASE("sidecar direction matches the coefficients used") {
  for (const char* dir : {"x_to_y", "y_to_x"}) {
    auto p = scratch(std::string("dir_") + dir + ".csv");
    REQUIRE(run(std::string("--seed 8 simulate --case 1 --n 20000 --family exponential --direction ") + dir + " -o " +
                p.string())
                .code == 0);
    auto side = json::parse(slurp(fs::path(p).replace_extension(".model.json")));
    CHECK(side["direction"] == dir);
    auto model = cmcausal::model_from_json(side);
    auto data = cmcausal::generate_data(model, 20000, side["data_seed"].get<std::uint64_t>());
    std::ifstream in(p);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(std::stod(row.substr(0, row.find(','))) == data.x()[0]);
    CHECK(std::stod(row.substr(row.find(',') + 1)) == data.y()[0]);
    double gamma = side["gamma"];
    Eigen::VectorXd x = data.x().array() - data.x().mean();
    Eigen::VectorXd y = data.y().array() - data.y().mean();
    double slope = std::string(dir) == "x_to_y" ? x.dot(y) / x.dot(x) : x.dot(y) / y.dot(y);
    CHECK(std::signbit(slope) == std::signbit(gamma));
  }
}

TEST_CASE("infer on a case 1 dataset") {
  auto p = scratch("case1.csv");
  REQUIRE(run("--seed 21 simulate --case 1 --n 50000 --family laplace -o " + p.string()).code == 0);
  auto r = run("--format json infer " + p.string());
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["verdict"] == "x_causes_y");
  CHECK(doc["latent_count"] == 0);
  CHECK(doc["k_used"] == 2);
  auto text = run("infer " + p.string());
  CHECK(text.code == 0);
  CHECK(text.out.find("rank trajectory") != std::string::npos);
  CHECK(text.out.find("|det| xy") != std::string::npos);
  auto csv = run("--format csv infer " + p.string());
  CHECK(csv.out.rfind("verdict,latent_count,k_used,det_xy,det_yx,exit_reason\nx_causes_y,0,2,", 0) == 0);
}

TEST_CASE("infer on independent noise, and schema stability") {
  auto p = scratch("indep.csv");
  {
    std::ofstream out(p);
    auto rng = cmcausal::make_rng(77);
    std::exponential_distribution<double> e;
    out << "a,b\n";
    for (int i = 0; i < 50000; ++i) out << e(rng) << ',' << -std::log(e(rng)) << '\n';
  }
  auto r = run("--format json infer " + p.string());
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["verdict"] == "conditionally_independent");
  CHECK(doc["latent_count"] == 0);

  auto c = scratch("case3.csv");
  REQUIRE(run("--seed 3 simulate --case 3 --n 5000 -o " + c.string()).code == 0);
  auto other = json::parse(run("--format json --k-max 2 --rank-tol 0.001 infer " + c.string()).out);
  std::vector<std::string> ka, kb;
  for (auto it = doc.begin(); it != doc.end(); ++it) ka.push_back(it.key());
  for (auto it = other.begin(); it != other.end(); ++it) kb.push_back(it.key());
  CHECK(ka == kb);
}

TEST_CASE("flags and environment overrides") {
  auto c = scratch("case3_env.csv");
  REQUIRE(run("--seed 3 simulate --case 3 --n 5000 -o " + c.string()).code == 0);
  auto forced = json::parse(run("--format json --assume-m 2 infer " + c.string()).out);
  CHECK(forced["k_used"] == 4);
  CHECK(forced["exit_reason"] == "forced_order");
  auto viaenv = run("--format json infer " + c.string());
  setenv("CMCAUSAL_ASSUME_M", "3", 1);
  auto forced_env = json::parse(run("--format json infer " + c.string()).out);
  unsetenv("CMCAUSAL_ASSUME_M");
  CHECK(forced_env["k_used"] == 5);
  CHECK(json::parse(viaenv.out)["config"]["assumed_latents"].is_null());
  auto eps = json::parse(run("--format json --epsilon 0.5 --k-max 4 infer " + c.string()).out);
  CHECK(eps["config"]["epsilon"] == 0.5);
  CHECK(eps["config"]["k_max"] == 4);
}

TEST_CASE("input errors exit with code 2 and name the line") {
  CHECK(run("infer " + scratch("does_not_exist.csv").string()).code == 2);
  auto bad = scratch("bad.csv");
  {
    std::ofstream out(bad);
    out << "x,y\n";
    for (int i = 0; i < 600; ++i) out << i * 0.5 << ',' << (i % 7) * 1.5 << '\n';
    out << "3.0,abc\n";
  }
  auto r = run("infer " + bad.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("line 602") != std::string::npos);

  auto constant = scratch("constant.csv");
  {
    std::ofstream out(constant);
    for (int i = 0; i < 600; ++i) out << "1.0," << i << '\n';
  }
  CHECK(run("--no-header infer " + constant.string()).code == 2);

  auto small = scratch("small.csv");
  {
    std::ofstream out(small);
    for (int i = 0; i < 100; ++i) out << i << ',' << (i * i) % 13 << '\n';
  }
  CHECK(run("infer " + small.string()).code == 2);
}

TEST_CASE("config errors exit with code 3") {
  auto c = scratch("cfg.csv");
  REQUIRE(run("--seed 1 simulate --case 1 --n 1000 -o " + c.string()).code == 0);
  CHECK(run("--k-max 12 infer " + c.string()).code == 3);
  CHECK(run("--rank-tol 2 infer " + c.string()).code == 3);
  CHECK(run("--format yaml infer " + c.string()).code == 3);
  CHECK(run("simulate --case 3 --m 1 -o " + scratch("x.csv").string()).code == 3);
  CHECK(run("frobnicate").code == 3);
  CHECK(run("").code == 3);
  auto plan = scratch("plan.json");
  {
    std::ofstream out(plan);
    out << R"({"cases": [1], "replicates": 0})";
  }
  CHECK(run("benchmark --plan " + plan.string()).code == 3);
  CHECK(run("simulate --case 1 -o /nonexistent_dir/x.csv").code == 2);
}

TEST_CASE("oracle-check") {
  auto ok = run("oracle-check --models 20");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS") != std::string::npos);
  CHECK(run("oracle-check --m-max 0 --models 100").code == 0);
  auto bad = run("oracle-check --m-min 1 --m-max 2 --models 5 --inject-zero-beta");
  CHECK(bad.code == 4);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  auto js = json::parse(run("--format json oracle-check --models 5").out);
  CHECK(js["passed"] == true);
}

TEST_CASE("benchmark writes reproducible reports") {
  auto plan = scratch("bench_plan.json");
  {
    std::ofstream out(plan);
    out << R"({"cases": [1], "families": ["laplace"], "sample_sizes": [2000], "replicates": 4, "seed": 3})";
  }
  auto a = scratch("bench_a.json"), b = scratch("bench_b.json"), csv = scratch("bench.csv");
  REQUIRE(run("benchmark --no-timing --plan " + plan.string() + " --json " + a.string() + " --csv " + csv.string())
              .code == 0);
  REQUIRE(run("benchmark --no-timing --plan " + plan.string() + " --json " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(count_lines(slurp(csv)) == 2);
  auto seeded = scratch("bench_c.json");
  REQUIRE(run("--seed 99 benchmark --no-timing --plan " + plan.string() + " --json " + seeded.string()).code == 0);
  CHECK(json::parse(slurp(seeded))["config"]["seed"] == 99);
  auto grid = run("benchmark --no-timing --plan " + plan.string() + " --grid-true-m 0");
  CHECK(grid.code == 0);
  CHECK(grid.out.find("AN=4") != std::string::npos);
}
