#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cmcausal/cumulants.hpp"
#include "cmcausal/sample.hpp"

namespace cmcausal {

/// Noise distributions d1..d5 of the simulation protocol.
enum class NoiseFamily { laplace, normal, logistic, exponential, uniform };

inline constexpr NoiseFamily kAllFamilies[] = {NoiseFamily::laplace, NoiseFamily::normal, NoiseFamily::logistic,
                                               NoiseFamily::exponential, NoiseFamily::uniform};

std::string_view to_string(NoiseFamily f);
/// Accepts the family name or its d1..d5 alias.
std::optional<NoiseFamily> noise_family_from_string(std::string_view s);

/// One independent noise source. Either distributional (family + scale,
/// optionally passed through e = log|r|) or, for the exact oracle, a list of
/// cumulants k_1 ... k_N (element r-1 holds k_r).
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::laplace;
  double scale = 1.0;
  bool log_abs = true;
  std::vector<double> cumulants;

  bool distributional() const { return cumulants.empty(); }
  int cumulant_order() const { return static_cast<int>(cumulants.size()); }
  double cumulant(int r) const { return cumulants.at(static_cast<std::size_t>(r - 1)); }

  void validate() const;

  static NoiseSpec from_family(NoiseFamily family, double scale, bool log_abs = true);
  static NoiseSpec from_cumulants(std::vector<double> cumulants);
};

enum class Direction { x_to_y, y_to_x, none };

std::string_view to_string(Direction d);
std::optional<Direction> direction_from_string(std::string_view s);

/// Weight of one independent source in X and in Y (path-coefficient form).
struct MixingSource {
  double in_x = 0.0;
  double in_y = 0.0;
  const NoiseSpec* noise = nullptr;
};

/// Ground-truth linear model over observed X, Y and m latent confounders.
///
/// For Direction::x_to_y:
///   L_i = E_li,  X = sum lambda_x[i] L_i + E_x,  Y = gamma X + sum lambda_y[i] L_i + E_y.
/// Direction::y_to_x exchanges the roles of X and Y in the structural
/// equations; Direction::none drops the direct edge (gamma must be zero).
struct ModelSpec {
  Direction direction = Direction::x_to_y;
  double gamma = 0.0;
  std::vector<double> lambda_x;
  std::vector<double> lambda_y;
  NoiseSpec noise_x;
  NoiseSpec noise_y;
  std::vector<NoiseSpec> noise_latent;
  int case_id = 0;  // 1..3 when drawn by sample_model, 0 otherwise
  std::uint64_t seed = 0;

  int latent_count() const { return static_cast<int>(lambda_x.size()); }

  /// Total effect of latent i on X.
  double alpha(int i) const;
  /// Total effect of latent i on Y.
  double beta(int i) const;

  /// Latent sources first, then E_x, then E_y. Pointers refer into *this.
  std::vector<MixingSource> sources() const;

  /// Structural checks: sizes agree, gamma == 0 for Direction::none.
  void validate_structure() const;
  /// validate_structure() plus irreducibility (alpha_i, beta_i != 0).
  void validate() const;

  /// Builds a model from total effects. lambda values are solved from
  /// alpha/beta and gamma.
  static ModelSpec from_path_coefficients(Direction direction, double gamma, const std::vector<double>& alpha,
                                          const std::vector<double>& beta, NoiseSpec noise_x, NoiseSpec noise_y,
                                          std::vector<NoiseSpec> noise_latent);
};

/// Exact joint cumulants of (X, Y): C(a, b) = sum_s u_s^a v_s^b k_{a+b}(E_s).
/// Every source needs explicit cumulants up to max_order.
CumulantTable<double> population_cumulants(const ModelSpec& model, int max_order);

enum class DirectionChoice { x_to_y, y_to_x, random };

struct SampleOptions {
  DirectionChoice direction = DirectionChoice::random;
  double coef_min = 0.2;  // |coefficient| range
  double coef_max = 0.8;
  double scale_min = 0.5;
  double scale_max = 1.5;
};

/// Random model for simulation case 1 (m = 0), 2 (m = 1) or 3 (m >= 2).
/// Each source draws its family uniformly from `families`.
ModelSpec sample_model(int case_id, int m, std::span<const NoiseFamily> families, std::uint64_t seed,
                       const SampleOptions& options = {});

/// Simulation case that matches a latent count: 0 -> 1, 1 -> 2, else 3.
int case_for_latent_count(int m);

struct OracleModelOptions {
  DirectionChoice direction = DirectionChoice::x_to_y;
  double coef_min = 0.7;  // |alpha|, |beta|, |gamma| range
  double coef_max = 1.3;
  /// Minimum |sin| of the angle between any two source weight vectors
  /// (u_s, v_s); keeps sources away from collinearity.
  double min_separation = 0.2;
  double cumulant_min = 0.5;  // |k_r| range for explicit cumulants
  double cumulant_max = 2.0;
  int max_order = 15;
};

/// Random cumulant-only model in path-coefficient form for exact checks.
ModelSpec sample_oracle_model(int m, std::uint64_t seed, const OracleModelOptions& options = {});

/// n rows drawn from the structural equations. Needs distributional noise.
BivariateSample generate_data(const ModelSpec& model, std::size_t n, std::uint64_t seed);

/// n i.i.d. draws of one noise source.
std::vector<double> draw_noise(const NoiseSpec& spec, std::size_t n, std::uint64_t seed);

/// Monte-Carlo cumulants k_1..k_max_order of a noise source. Explicit
/// cumulant specs are returned as given.
std::vector<double> noise_cumulants_mc(const NoiseSpec& spec, int max_order, std::size_t n_mc, std::uint64_t seed);

/// Copy of `model` whose sources carry Monte-Carlo cumulants, so that
/// population_cumulants applies.
ModelSpec with_mc_cumulants(const ModelSpec& model, int max_order, std::size_t n_mc, std::uint64_t seed);

}  // namespace cmcausal
