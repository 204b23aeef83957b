#include <doctest.h>

#include <random>

#include "cmcausal/errors.hpp"
#include "cmcausal/identify.hpp"
#include "cmcausal/model.hpp"
#include "cmcausal/rng.hpp"
#include "support/random_tables.hpp"

using namespace cmcausal;

namespace {

RankReport<double> report(int rank, int k) {
  RankReport<double> r;
  r.rank = rank;
  r.deficient = rank < k;
  return r;
}

IdentifyConfig population_config() {
  IdentifyConfig c;
  c.rank_rel_tol = 1e-8;
  return c;
}

BivariateSample independent_noise(std::size_t n, std::uint64_t seed) {
  auto model = sample_model(1, 0, std::vector<NoiseFamily>{NoiseFamily::laplace}, seed);
  model.direction = Direction::none;
  model.gamma = 0.0;
  return generate_data(model, n, derive_seed(seed, {1}));
}

}  // namespace

TEST_CASE("config validation") {
  IdentifyConfig c;
  CHECK_NOTHROW(c.validate());
  c.k_max = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.k_max = 9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.epsilon = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.assumed_latents = 7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.assumed_latents = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("infer_latent_count examples") {
  CHECK(infer_latent_count(report(3, 4), report(4, 4)) == 2);
  CHECK(infer_latent_count(report(1, 2), report(1, 2)) == 0);
  CHECK(infer_latent_count(report(2, 3), report(3, 3)) == 1);
  CHECK(infer_latent_count(report(0, 2), report(2, 2)) == 0);
  CHECK_THROWS_AS(infer_latent_count(report(3, 3), report(3, 3)), ConfigError);
}

TEST_CASE("population example without confounders") {
  auto model = ModelSpec::from_path_coefficients(Direction::x_to_y, 2.0, {}, {}, NoiseSpec::from_cumulants({0, 1, 1}),
                                                 NoiseSpec::from_cumulants({0, 1, 1}), {});
  IdentifyConfig c = population_config();
  c.k_max = 2;
  auto r = identify_from_cumulants(population_cumulants(model, 3), c);
  CHECK(r.verdict == Verdict::x_causes_y);
  CHECK(r.k_used == 2);
  REQUIRE(r.latent_count);
  CHECK(*r.latent_count == 0);
  CHECK(r.det_xy == doctest::Approx(0.0));
  CHECK(r.det_yx == doctest::Approx(2.0));
  CHECK(r.exit_reason == ExitReason::rank_deficiency);
}

TEST_CASE("population case 3 with two latents") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto model = sample_oracle_model(2, seed);
    auto r = identify_from_cumulants(population_cumulants(model, 11), population_config());
    CHECK(r.verdict == Verdict::x_causes_y);
    CHECK(r.k_used == 4);
    REQUIRE(r.latent_count);
    CHECK(*r.latent_count == 2);
    CHECK(r.trajectory.size() == 3);
    CHECK(std::abs(r.det_xy - r.det_yx) >= 1e-5);
  }
}

TEST_CASE("population soundness and latent count for m = 0..4") {
  OracleModelOptions yx;
  yx.direction = DirectionChoice::y_to_x;
  for (int m = 0; m <= 4; ++m)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      for (const auto& opts : {OracleModelOptions{}, yx}) {
        auto model = sample_oracle_model(m, derive_seed(seed, {std::uint64_t(m)}), opts);
        auto r = identify_from_cumulants(population_cumulants(model, 15), population_config());
        Verdict want = model.direction == Direction::x_to_y ? Verdict::x_causes_y : Verdict::y_causes_x;
        CHECK(r.verdict == want);
        REQUIRE(r.latent_count);
        CHECK(*r.latent_count == m);
        CHECK(r.latent_count_min_rank == m);
      }
    }
}

TEST_CASE("forced order k = m + 3 on population matrices") {
  for (int m = 0; m <= 4; ++m)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto model = sample_oracle_model(m, derive_seed(seed, {std::uint64_t(m), 7}));
      IdentifyConfig c = population_config();
      c.assumed_latents = m + 1;
      auto r = identify_from_cumulants(population_cumulants(model, 15), c);
      CHECK(r.k_used == m + 3);
      CHECK(r.exit_reason == ExitReason::forced_order);
      CHECK(r.verdict == Verdict::x_causes_y);
      CHECK(r.latent_count_min_rank == m);
    }
}

TEST_CASE("independent noises are conditionally independent at m = 0") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = identify_direction(independent_noise(100000, seed), IdentifyConfig{});
    if (r.verdict == Verdict::conditionally_independent && r.latent_count == 0 && r.k_used == 2) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("verdict antisymmetry under swapping x and y") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    int c = 1 + static_cast<int>(seed % 3);
    int m = c == 1 ? 0 : c == 2 ? 1 : 2;
    auto model = sample_model(c, m, std::vector<NoiseFamily>{std::begin(kAllFamilies), std::end(kAllFamilies)}, seed);
    auto s = generate_data(model, 5000, derive_seed(seed, {1}));
    auto a = identify_direction(s, IdentifyConfig{});
    auto b = identify_direction(s.swapped(), IdentifyConfig{});
    CHECK(b.verdict == swap_verdict(a.verdict));
    CHECK(a.latent_count == b.latent_count);
    CHECK(a.k_used == b.k_used);
    CHECK(a.det_xy == b.det_yx);
    CHECK(a.det_yx == b.det_xy);
    CHECK_FALSE((a.verdict == Verdict::x_causes_y && b.verdict == Verdict::x_causes_y));
  }
}

TEST_CASE("determinism and k_max exit") {
  auto s = cmcausal::testing::random_sample(3000, 4);
  IdentifyConfig c;
  c.rank_rel_tol = 1e-12;
  c.k_max = 3;
  c.min_samples = 1000;
  auto a = identify_direction(s, c);
  auto b = identify_direction(s, c);
  CHECK(a.verdict == b.verdict);
  CHECK(a.det_xy == b.det_xy);
  CHECK(a.verdict == Verdict::undecided);
  CHECK(a.exit_reason == ExitReason::k_max_reached);
  CHECK_FALSE(a.latent_count.has_value());
  CHECK(a.trajectory.size() == 2);
}

TEST_CASE("directional verdicts follow the smaller determinant") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto model = sample_model(2, 1, std::vector<NoiseFamily>{NoiseFamily::laplace}, seed);
    auto r = identify_direction(generate_data(model, 5000, seed), IdentifyConfig{});
    if (r.verdict == Verdict::x_causes_y) CHECK(r.det_xy < r.det_yx);
    if (r.verdict == Verdict::y_causes_x) CHECK(r.det_yx < r.det_xy);
    if (r.exit_reason == ExitReason::rank_deficiency) {
      REQUIRE(r.latent_count);
      CHECK(*r.latent_count == r.k_used - 2);
    }
  }
}

TEST_CASE("epsilon modes") {
  auto model = ModelSpec::from_path_coefficients(Direction::x_to_y, 2.0, {}, {}, NoiseSpec::from_cumulants({0, 1, 1}),
                                                 NoiseSpec::from_cumulants({0, 1, 1}), {});
  auto pop = population_cumulants(model, 3);
  IdentifyConfig c = population_config();
  c.k_max = 2;
  c.epsilon = 3.0;
  auto r = identify_from_cumulants(pop, c);
  CHECK(r.verdict == Verdict::x_causes_y);  // equal under epsilon, lower rank is the cause
  c.epsilon = 0.5;
  c.epsilon_mode = EpsilonMode::relative;
  CHECK(identify_from_cumulants(pop, c).verdict == Verdict::x_causes_y);
}

TEST_CASE("input errors") {
  auto s = cmcausal::testing::random_sample(400, 1);
  CHECK_THROWS_AS(identify_direction(s, IdentifyConfig{}), InputError);
  std::vector<double> x(600, 1.0), y(600);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = double(i);
  CHECK_THROWS_AS(identify_direction(BivariateSample(x, y), IdentifyConfig{}), InputError);
}

TEST_CASE("verdict strings") {
  for (auto v : {Verdict::x_causes_y, Verdict::y_causes_x, Verdict::conditionally_independent, Verdict::undecided}) {
    CHECK(verdict_from_string(to_string(v)) == v);
    CHECK(swap_verdict(swap_verdict(v)) == v);
  }
  CHECK_FALSE(verdict_from_string("sideways"));
}
