#include "cmcausal/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cmcausal/errors.hpp"
#include "cmcausal/rng.hpp"

namespace cmcausal {

namespace {

// Uniform on the open interval (0, 1); never returns 0, 1 or 0.5.
double open_unit(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * open_unit(rng); }

double signed_magnitude(Rng& rng, double lo, double hi) {
  const double sign = (rng() >> 63) != 0 ? 1.0 : -1.0;
  return sign * uniform_in(rng, lo, hi);
}

// Unit-scale draw from a family, centered at zero except the exponential.
double standard_draw(NoiseFamily family, Rng& rng, std::normal_distribution<double>& normal) {
  switch (family) {
    case NoiseFamily::laplace: {
      const double v = open_unit(rng) - 0.5;
      return v < 0.0 ? std::log1p(2.0 * v) : -std::log1p(-2.0 * v);
    }
    case NoiseFamily::normal:
      return normal(rng);
    case NoiseFamily::logistic: {
      const double u = open_unit(rng);
      return std::log(u / (1.0 - u));
    }
    case NoiseFamily::exponential:
      return -std::log(open_unit(rng));
    case NoiseFamily::uniform:
      return 2.0 * open_unit(rng) - 1.0;
  }
  return 0.0;
}

Direction resolve(DirectionChoice choice, Rng& rng) {
  switch (choice) {
    case DirectionChoice::x_to_y:
      return Direction::x_to_y;
    case DirectionChoice::y_to_x:
      return Direction::y_to_x;
    case DirectionChoice::random:
      return (rng() >> 63) != 0 ? Direction::x_to_y : Direction::y_to_x;
  }
  return Direction::x_to_y;
}

bool well_separated(const std::vector<MixingSource>& sources, double min_separation) {
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      const double cross = sources[i].in_x * sources[j].in_y - sources[j].in_x * sources[i].in_y;
      const double norms = std::hypot(sources[i].in_x, sources[i].in_y) * std::hypot(sources[j].in_x, sources[j].in_y);
      if (std::abs(cross) < min_separation * norms) return false;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::laplace:
      return "laplace";
    case NoiseFamily::normal:
      return "normal";
    case NoiseFamily::logistic:
      return "logistic";
    case NoiseFamily::exponential:
      return "exponential";
    case NoiseFamily::uniform:
      return "uniform";
  }
  return "laplace";
}

std::optional<NoiseFamily> noise_family_from_string(std::string_view s) {
  static constexpr std::string_view aliases[] = {"d1", "d2", "d3", "d4", "d5"};
  for (std::size_t i = 0; i < std::size(kAllFamilies); ++i) {
    if (s == to_string(kAllFamilies[i]) || s == aliases[i]) return kAllFamilies[i];
  }
  return std::nullopt;
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::x_to_y:
      return "x_to_y";
    case Direction::y_to_x:
      return "y_to_x";
    case Direction::none:
      return "none";
  }
  return "none";
}

std::optional<Direction> direction_from_string(std::string_view s) {
  for (Direction d : {Direction::x_to_y, Direction::y_to_x, Direction::none}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

void NoiseSpec::validate() const {
  if (distributional()) {
    if (!(scale > 0.0) && !(scale == 0.0 && !log_abs)) {
      throw ConfigError("noise scale must be > 0 (got " + std::to_string(scale) + ")");
    }
    return;
  }
  bool non_gaussian = false;
  for (std::size_t r = 2; r < cumulants.size(); ++r) non_gaussian = non_gaussian || cumulants[r] != 0.0;
  if (!non_gaussian) throw ConfigError("explicit noise cumulants need a nonzero entry of order >= 3");
}

NoiseSpec NoiseSpec::from_family(NoiseFamily family, double scale, bool log_abs) {
  NoiseSpec spec;
  spec.family = family;
  spec.scale = scale;
  spec.log_abs = log_abs;
  spec.validate();
  return spec;
}

NoiseSpec NoiseSpec::from_cumulants(std::vector<double> cumulants) {
  NoiseSpec spec;
  spec.cumulants = std::move(cumulants);
  spec.validate();
  return spec;
}

double ModelSpec::alpha(int i) const {
  const auto idx = static_cast<std::size_t>(i);
  if (direction == Direction::y_to_x) return lambda_x.at(idx) + gamma * lambda_y.at(idx);
  return lambda_x.at(idx);
}

double ModelSpec::beta(int i) const {
  const auto idx = static_cast<std::size_t>(i);
  if (direction == Direction::x_to_y) return lambda_y.at(idx) + gamma * lambda_x.at(idx);
  return lambda_y.at(idx);
}

std::vector<MixingSource> ModelSpec::sources() const {
  std::vector<MixingSource> out;
  const int m = latent_count();
  out.reserve(static_cast<std::size_t>(m + 2));
  for (int i = 0; i < m; ++i) out.push_back({alpha(i), beta(i), &noise_latent[static_cast<std::size_t>(i)]});
  switch (direction) {
    case Direction::x_to_y:
      out.push_back({1.0, gamma, &noise_x});
      out.push_back({0.0, 1.0, &noise_y});
      break;
    case Direction::y_to_x:
      out.push_back({1.0, 0.0, &noise_x});
      out.push_back({gamma, 1.0, &noise_y});
      break;
    case Direction::none:
      out.push_back({1.0, 0.0, &noise_x});
      out.push_back({0.0, 1.0, &noise_y});
      break;
  }
  return out;
}

void ModelSpec::validate_structure() const {
  if (lambda_y.size() != lambda_x.size() || noise_latent.size() != lambda_x.size()) {
    throw ConfigError("latent coefficient and noise lists must have equal length");
  }
  if (direction == Direction::none && gamma != 0.0) throw ConfigError("a model without a direct edge needs gamma = 0");
  noise_x.validate();
  noise_y.validate();
  for (const auto& n : noise_latent) n.validate();
}

void ModelSpec::validate() const {
  validate_structure();
  for (int i = 0; i < latent_count(); ++i) {
    if (alpha(i) == 0.0 || beta(i) == 0.0) {
      throw ConfigError("latent " + std::to_string(i) + " must have nonzero total effects on both X and Y");
    }
  }
}

ModelSpec ModelSpec::from_path_coefficients(Direction direction, double gamma, const std::vector<double>& alpha,
                                            const std::vector<double>& beta, NoiseSpec noise_x, NoiseSpec noise_y,
                                            std::vector<NoiseSpec> noise_latent) {
  if (alpha.size() != beta.size()) throw ConfigError("alpha and beta must have equal length");
  ModelSpec model;
  model.direction = direction;
  model.gamma = gamma;
  model.noise_x = std::move(noise_x);
  model.noise_y = std::move(noise_y);
  model.noise_latent = std::move(noise_latent);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    switch (direction) {
      case Direction::x_to_y:
        model.lambda_x.push_back(alpha[i]);
        model.lambda_y.push_back(beta[i] - gamma * alpha[i]);
        break;
      case Direction::y_to_x:
        model.lambda_x.push_back(alpha[i] - gamma * beta[i]);
        model.lambda_y.push_back(beta[i]);
        break;
      case Direction::none:
        model.lambda_x.push_back(alpha[i]);
        model.lambda_y.push_back(beta[i]);
        break;
    }
  }
  model.validate_structure();
  return model;
}

CumulantTable<double> population_cumulants(const ModelSpec& model, int max_order) {
  model.validate_structure();
  const auto sources = model.sources();
  for (const auto& s : sources) {
    if (s.noise->cumulant_order() < max_order) {
      throw ConfigError("a noise source lacks explicit cumulants up to order " + std::to_string(max_order));
    }
  }
  CumulantTable<double> table(max_order);
  for (int a = 0; a <= max_order; ++a) {
    for (int b = 0; a + b <= max_order; ++b) {
      if (a + b == 0) continue;
      double acc = 0.0;
      for (const auto& s : sources) acc += std::pow(s.in_x, a) * std::pow(s.in_y, b) * s.noise->cumulant(a + b);
      table(a, b) = acc;
    }
  }
  return table;
}

int case_for_latent_count(int m) {
  if (m < 0) throw ConfigError("latent count must be >= 0");
  return m == 0 ? 1 : (m == 1 ? 2 : 3);
}

ModelSpec sample_model(int case_id, int m, std::span<const NoiseFamily> families, std::uint64_t seed,
                       const SampleOptions& options) {
  const bool valid = (case_id == 1 && m == 0) || (case_id == 2 && m == 1) || (case_id == 3 && m >= 2 && m <= 6);
  if (!valid) {
    throw ConfigError("invalid case/latent combination: case " + std::to_string(case_id) + " with m = " +
                      std::to_string(m) + " (case 1: m = 0, case 2: m = 1, case 3: 2 <= m <= 6)");
  }
  if (families.empty()) throw ConfigError("at least one noise family is required");
  if (!(options.coef_min > 0.0 && options.coef_min <= options.coef_max)) throw ConfigError("bad coefficient range");
  if (!(options.scale_min > 0.0 && options.scale_min <= options.scale_max)) throw ConfigError("bad scale range");

  Rng rng = make_rng(seed, {0x6d6f64656cULL});
  auto coefficient = [&] { return signed_magnitude(rng, options.coef_min, options.coef_max); };
  auto noise = [&] {
    const auto pick = static_cast<std::size_t>(rng() % families.size());
    return NoiseSpec::from_family(families[pick], uniform_in(rng, options.scale_min, options.scale_max));
  };

  ModelSpec model;
  model.case_id = case_id;
  model.seed = seed;
  model.direction = resolve(options.direction, rng);
  do {
    model.gamma = coefficient();
    model.lambda_x.clear();
    model.lambda_y.clear();
    for (int i = 0; i < m; ++i) {
      model.lambda_x.push_back(coefficient());
      model.lambda_y.push_back(coefficient());
    }
    bool ok = true;
    for (int i = 0; i < m; ++i) ok = ok && model.alpha(i) != 0.0 && model.beta(i) != 0.0;
    if (ok) break;
  } while (true);
  model.noise_x = noise();
  model.noise_y = noise();
  for (int i = 0; i < m; ++i) model.noise_latent.push_back(noise());
  model.validate();
  return model;
}

ModelSpec sample_oracle_model(int m, std::uint64_t seed, const OracleModelOptions& options) {
  if (m < 0) throw ConfigError("latent count must be >= 0");
  if (options.max_order < 3) throw ConfigError("oracle models need cumulants up to order >= 3");
  Rng rng = make_rng(seed, {0x6f7261636c65ULL});
  auto coefficient = [&] { return signed_magnitude(rng, options.coef_min, options.coef_max); };
  auto noise = [&] {
    std::vector<double> k(static_cast<std::size_t>(options.max_order));
    k[0] = 0.0;
    k[1] = uniform_in(rng, options.cumulant_min, options.cumulant_max);
    for (int r = 3; r <= options.max_order; ++r) {
      k[static_cast<std::size_t>(r - 1)] = signed_magnitude(rng, options.cumulant_min, options.cumulant_max);
    }
    return NoiseSpec::from_cumulants(std::move(k));
  };

  const Direction direction = resolve(options.direction, rng);
  constexpr int kMaxAttempts = 1000000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double gamma = coefficient();
    std::vector<double> alpha, beta;
    for (int i = 0; i < m; ++i) {
      alpha.push_back(coefficient());
      beta.push_back(coefficient());
    }
    ModelSpec model = ModelSpec::from_path_coefficients(direction, gamma, alpha, beta, NoiseSpec::from_cumulants({0, 1, 1}),
                                                        NoiseSpec::from_cumulants({0, 1, 1}),
                                                        std::vector<NoiseSpec>(static_cast<std::size_t>(m),
                                                                               NoiseSpec::from_cumulants({0, 1, 1})));
    if (!well_separated(model.sources(), options.min_separation)) continue;
    model.noise_x = noise();
    model.noise_y = noise();
    for (auto& n : model.noise_latent) n = noise();
    model.seed = seed;
    model.validate();
    return model;
  }
  throw ConfigError("could not draw a well-separated oracle model; lower min_separation");
}

std::vector<double> draw_noise(const NoiseSpec& spec, std::size_t n, std::uint64_t seed) {
  if (!spec.distributional()) throw ConfigError("cannot draw samples from a cumulant-only noise source");
  spec.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& e : out) {
    double r = spec.scale * standard_draw(spec.family, rng, normal);
    if (spec.log_abs) {
      while (r == 0.0) r = spec.scale * standard_draw(spec.family, rng, normal);
      r = std::log(std::abs(r));
    }
    e = r;
  }
  return out;
}

BivariateSample generate_data(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample size must be >= 1");
  model.validate_structure();
  const int m = model.latent_count();
  std::vector<std::vector<double>> latent;
  for (int i = 0; i < m; ++i) {
    latent.push_back(draw_noise(model.noise_latent[static_cast<std::size_t>(i)], n,
                                derive_seed(seed, {static_cast<std::uint64_t>(i)})));
  }
  const auto ex = draw_noise(model.noise_x, n, derive_seed(seed, {0x78ULL << 32}));
  const auto ey = draw_noise(model.noise_y, n, derive_seed(seed, {0x79ULL << 32}));

  std::vector<double> x(n), y(n);
  for (std::size_t t = 0; t < n; ++t) {
    double lx = 0.0, ly = 0.0;
    for (int i = 0; i < m; ++i) {
      const double l = latent[static_cast<std::size_t>(i)][t];
      lx += model.lambda_x[static_cast<std::size_t>(i)] * l;
      ly += model.lambda_y[static_cast<std::size_t>(i)] * l;
    }
    switch (model.direction) {
      case Direction::x_to_y:
        x[t] = lx + ex[t];
        y[t] = model.gamma * x[t] + ly + ey[t];
        break;
      case Direction::y_to_x:
        y[t] = ly + ey[t];
        x[t] = model.gamma * y[t] + lx + ex[t];
        break;
      case Direction::none:
        x[t] = lx + ex[t];
        y[t] = ly + ey[t];
        break;
    }
  }
  return BivariateSample(x, y);
}

std::vector<double> noise_cumulants_mc(const NoiseSpec& spec, int max_order, std::size_t n_mc, std::uint64_t seed) {
  if (max_order < 1) throw ConfigError("cumulant order must be >= 1");
  if (!spec.distributional()) {
    if (spec.cumulant_order() < max_order) throw ConfigError("explicit cumulant list is too short");
    return {spec.cumulants.begin(), spec.cumulants.begin() + max_order};
  }
  if (n_mc < 2) throw ConfigError("Monte-Carlo size must be >= 2");
  const auto draws = draw_noise(spec, n_mc, seed);
  return univariate_cumulants(draws, max_order);
}

ModelSpec with_mc_cumulants(const ModelSpec& model, int max_order, std::size_t n_mc, std::uint64_t seed) {
  ModelSpec out = model;
  auto convert = [&](NoiseSpec& spec, std::uint64_t key) {
    auto k = noise_cumulants_mc(spec, max_order, n_mc, derive_seed(seed, {key}));
    spec.cumulants = std::move(k);
  };
  for (std::size_t i = 0; i < out.noise_latent.size(); ++i) convert(out.noise_latent[i], i);
  convert(out.noise_x, 0x78ULL << 32);
  convert(out.noise_y, 0x79ULL << 32);
  return out;
}

}  // namespace cmcausal
