#pragma once

#include "armrl/adam.hpp"
#include "armrl/estimation.hpp"
#include "armrl/gaussian_policy.hpp"

namespace armrl {

struct VpgConfig {
  // Nominal timesteps per update; the number of episodes collected per
  // iteration is max(1, batch_timesteps / horizon).
  int batch_timesteps = 6000;
  double learning_rate = 1e-2;
  GaeConfig gae;
  // With a baseline the weights are standardized GAE advantages; without it
  // the literal score-function estimator weighted by discounted returns.
  bool use_baseline = true;
  std::vector<int> baseline_hidden{100, 100};  // relu value net
  double baseline_delta = 0.01;
  int baseline_cg_iterations = 10;

  int episodes_per_iteration(int horizon) const {
    return std::max(1, batch_timesteps / std::max(1, horizon));
  }
  void validate(int horizon) const;
};

// The score-function gradient: (1 / n_episodes) sum_i sum_t
// grad log pi(a|s) * weight. Weights are discounted returns or advantages.
Vec vpg_gradient(const GaussianMlpPolicy& policy,
                 const std::vector<Trajectory>& trajs,
                 const std::vector<std::vector<double>>& weights);

struct VpgUpdateResult {
  double grad_norm = 0.0;
  double mean_log_prob_before = 0.0;
  double mean_log_prob_after = 0.0;
};

// One Adam ascent step along vpg_gradient. Weights come from the config:
// standardized GAE advantages against value_net when use_baseline is set,
// otherwise raw discounted returns. value_net may be null in that case.
VpgUpdateResult vpg_update(GaussianMlpPolicy& policy,
                           const std::vector<Trajectory>& trajs,
                           const VpgConfig& cfg, AdamState& adam,
                           Mlp* value_net);

}  // namespace armrl
