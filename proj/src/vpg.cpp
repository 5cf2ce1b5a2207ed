#include "armrl/vpg.hpp"

#include <stdexcept>

#include "armrl/parallel.hpp"
#include "armrl/rollout.hpp"

namespace armrl {

void VpgConfig::validate(int horizon) const {
  if (batch_timesteps < horizon) {
    throw std::invalid_argument("VpgConfig: batch must cover at least one horizon");
  }
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("VpgConfig: learning_rate must be positive");
  }
  gae.validate();
}

Vec vpg_gradient(const GaussianMlpPolicy& policy,
                 const std::vector<Trajectory>& trajs,
                 const std::vector<std::vector<double>>& weights) {
  if (trajs.empty()) throw std::invalid_argument("vpg_gradient: empty batch");
  const FlatBatch batch = flatten(trajs);
  const std::vector<double> w = flatten_weights(weights);
  if (w.size() != batch.states.size()) {
    throw std::invalid_argument("vpg_gradient: weights do not match batch");
  }
  const Vec sum = score_weighted_sum(policy, batch.states, batch.actions_raw, w);
  return sum / static_cast<double>(trajs.size());
}

namespace {

double mean_log_prob(const GaussianMlpPolicy& policy, const FlatBatch& batch) {
  const double total = par::block_reduce<double>(
      batch.states.size(), [] { return 0.0; },
      [&](double& acc, std::size_t i) {
        acc += policy.log_prob(batch.states[i], batch.actions_raw[i]);
      },
      [](double& t, const double& p) { t += p; });
  return total / static_cast<double>(batch.states.size());
}

}  // namespace

VpgUpdateResult vpg_update(GaussianMlpPolicy& policy,
                           const std::vector<Trajectory>& trajs,
                           const VpgConfig& cfg, AdamState& adam,
                           Mlp* value_net) {
  std::vector<std::vector<double>> weights;
  if (cfg.use_baseline) {
    if (value_net == nullptr) {
      throw std::invalid_argument("vpg_update: use_baseline requires a value net");
    }
    const FlatBatch batch = flatten(trajs);
    const ValueFn value = [&](const Vec& s) { return value_net->forward(s)[0]; };
    const auto targets = return_targets(trajs, cfg.gae.gamma, value);
    fit_baseline(*value_net, batch.states, flatten_weights(targets),
                 cfg.baseline_delta, cfg.baseline_cg_iterations);
    weights = gae_advantages(trajs, value, cfg.gae);
    standardize(weights);
  } else {
    weights.resize(trajs.size());
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      weights[i].resize(trajs[i].length());
      for (int t = 0; t < trajs[i].length(); ++t) {
        weights[i][t] = discounted_return(trajs[i], cfg.gae.gamma, t);
      }
    }
  }

  const Vec grad = vpg_gradient(policy, trajs, weights);
  if (!grad.allFinite()) {
    throw std::runtime_error("vpg_update: non-finite policy gradient");
  }

  const FlatBatch batch = flatten(trajs);
  VpgUpdateResult result;
  result.grad_norm = grad.norm();
  result.mean_log_prob_before = mean_log_prob(policy, batch);

  Vec params = policy.flatten_params();
  adam_step(params, -grad, adam);  // ascent
  policy.set_params(params);

  result.mean_log_prob_after = mean_log_prob(policy, batch);
  return result;
}

}  // namespace armrl
