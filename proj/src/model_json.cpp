#include "cmcausal/model_json.hpp"

#include <string>

#include "cmcausal/errors.hpp"

namespace cmcausal {

using nlohmann::json;

json to_json(const NoiseSpec& spec) {
  if (!spec.distributional()) return json{{"cumulants", spec.cumulants}};
  return json{{"family", std::string(to_string(spec.family))}, {"scale", spec.scale}, {"log_abs", spec.log_abs}};
}

json to_json(const ModelSpec& model) {
  json latent = json::array();
  for (const auto& n : model.noise_latent) latent.push_back(to_json(n));
  std::vector<double> alpha, beta;
  for (int i = 0; i < model.latent_count(); ++i) {
    alpha.push_back(model.alpha(i));
    beta.push_back(model.beta(i));
  }
  return json{{"case", model.case_id},
              {"seed", model.seed},
              {"direction", std::string(to_string(model.direction))},
              {"gamma", model.gamma},
              {"latent_count", model.latent_count()},
              {"lambda_x", model.lambda_x},
              {"lambda_y", model.lambda_y},
              {"alpha", alpha},
              {"beta", beta},
              {"noise", {{"x", to_json(model.noise_x)}, {"y", to_json(model.noise_y)}, {"latent", latent}}}};
}

NoiseSpec noise_spec_from_json(const json& doc) {
  try {
    if (doc.contains("cumulants")) return NoiseSpec::from_cumulants(doc.at("cumulants").get<std::vector<double>>());
    const auto name = doc.at("family").get<std::string>();
    const auto family = noise_family_from_string(name);
    if (!family) throw ConfigError("unknown noise family '" + name + "'");
    return NoiseSpec::from_family(*family, doc.at("scale").get<double>(), doc.value("log_abs", true));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed noise spec: ") + e.what());
  }
}

ModelSpec model_from_json(const json& doc) {
  try {
    ModelSpec model;
    const auto dir = doc.at("direction").get<std::string>();
    const auto direction = direction_from_string(dir);
    if (!direction) throw ConfigError("unknown direction '" + dir + "'");
    model.direction = *direction;
    model.gamma = doc.at("gamma").get<double>();
    model.lambda_x = doc.at("lambda_x").get<std::vector<double>>();
    model.lambda_y = doc.at("lambda_y").get<std::vector<double>>();
    model.case_id = doc.value("case", 0);
    model.seed = doc.value("seed", std::uint64_t{0});
    const auto& noise = doc.at("noise");
    model.noise_x = noise_spec_from_json(noise.at("x"));
    model.noise_y = noise_spec_from_json(noise.at("y"));
    for (const auto& n : noise.at("latent")) model.noise_latent.push_back(noise_spec_from_json(n));
    model.validate_structure();
    return model;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace cmcausal
