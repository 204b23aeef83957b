#pragma once

#include <json.hpp>

#include "cmcausal/model.hpp"

namespace cmcausal {

// Model documents:
// {
//   "case": 2, "seed": 7, "direction": "x_to_y", "gamma": 0.4,
//   "latent_count": 1, "lambda_x": [...], "lambda_y": [...],
//   "alpha": [...], "beta": [...],            (derived, informational)
//   "noise": { "x": N, "y": N, "latent": [N, ...] }
// }
// with N = {"family": "laplace", "scale": 0.9, "log_abs": true}
//       or {"cumulants": [k1, k2, ...]}.
nlohmann::json to_json(const NoiseSpec& spec);
nlohmann::json to_json(const ModelSpec& model);

NoiseSpec noise_spec_from_json(const nlohmann::json& doc);
/// Throws ConfigError on missing or malformed fields.
ModelSpec model_from_json(const nlohmann::json& doc);

}  // namespace cmcausal
