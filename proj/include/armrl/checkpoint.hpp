#pragma once

#include <string>

#include <json.hpp>

#include "armrl/gaussian_policy.hpp"
#include "armrl/mlp.hpp"
#include "armrl/naf.hpp"

namespace armrl {

// Checkpoints are JSON: an architecture descriptor plus flat parameter
// arrays. Doubles are serialized with shortest-round-trip precision, so a
// save/load cycle reproduces parameters bit-exactly.

nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json policy_to_json(const GaussianMlpPolicy& policy);
GaussianMlpPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json naf_to_json(const NafNetwork& online, const NafNetwork& target);
std::pair<NafNetwork, NafNetwork> naf_from_json(const nlohmann::json& j);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace armrl
