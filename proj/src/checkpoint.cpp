#include "armrl/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace armrl {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

}  // namespace

json mlp_to_json(const Mlp& net) {
  json j;
  j["layer_sizes"] = net.layer_sizes();
  j["hidden_activation"] = to_string(net.hidden_activation());
  j["params"] = vec_to_json(net.flatten_params());
  return j;
}

Mlp mlp_from_json(const json& j) {
  Mlp net(j.at("layer_sizes").get<std::vector<int>>(),
          activation_from_string(j.at("hidden_activation").get<std::string>()));
  net.set_params(vec_from_json(j.at("params")));
  return net;
}

json policy_to_json(const GaussianMlpPolicy& policy) {
  json j;
  j["kind"] = "gaussian_policy";
  j["mean_net"] = mlp_to_json(policy.mean_net());
  j["log_std"] = vec_to_json(policy.log_std());
  j["action_low"] = vec_to_json(policy.action_low());
  j["action_high"] = vec_to_json(policy.action_high());
  return j;
}

GaussianMlpPolicy policy_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "gaussian_policy") {
    throw std::invalid_argument("policy_from_json: not a gaussian_policy checkpoint");
  }
  GaussianMlpPolicy policy(mlp_from_json(j.at("mean_net")),
                           vec_from_json(j.at("action_low")),
                           vec_from_json(j.at("action_high")));
  policy.log_std() = vec_from_json(j.at("log_std"));
  return policy;
}

json naf_to_json(const NafNetwork& online, const NafNetwork& target) {
  json j;
  j["kind"] = "naf";
  j["action_dim"] = online.action_dim();
  j["online_net"] = mlp_to_json(online.net());
  j["target_net"] = mlp_to_json(target.net());
  return j;
}

std::pair<NafNetwork, NafNetwork> naf_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "naf") {
    throw std::invalid_argument("naf_from_json: not a naf checkpoint");
  }
  const int n_a = j.at("action_dim").get<int>();
  const Mlp online_net = mlp_from_json(j.at("online_net"));
  const Mlp target_net = mlp_from_json(j.at("target_net"));

  const auto& sizes = online_net.layer_sizes();
  std::vector<int> hidden(sizes.begin() + 1, sizes.end() - 1);
  NafNetwork online(online_net.input_dim(), n_a, hidden);
  online.set_params(online_net.flatten_params());
  NafNetwork target(target_net.input_dim(), n_a, hidden);
  target.set_params(target_net.flatten_params());
  return {std::move(online), std::move(target)};
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_json: cannot open " + path);
  out << j.dump(2) << '\n';
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_json: cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace armrl
