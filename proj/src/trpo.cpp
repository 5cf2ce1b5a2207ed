#include "armrl/trpo.hpp"

#include <cmath>
#include <stdexcept>

#include "armrl/cg.hpp"
#include "armrl/parallel.hpp"
#include "armrl/rollout.hpp"

namespace armrl {

void TrpoConfig::validate() const {
  if (delta_d <= 0.0) throw std::invalid_argument("TrpoConfig: delta_d must be positive");
  if (delta_v <= 0.0) throw std::invalid_argument("TrpoConfig: delta_v must be positive");
  if (cg_iterations < 1) throw std::invalid_argument("TrpoConfig: cg_iterations must be >= 1");
  if (cg_damping < 0.0) throw std::invalid_argument("TrpoConfig: cg_damping must be non-negative");
  if (!(backtrack_coeff > 0.0 && backtrack_coeff < 1.0)) {
    throw std::invalid_argument("TrpoConfig: backtrack_coeff must lie in (0,1)");
  }
  if (max_backtracks < 1) throw std::invalid_argument("TrpoConfig: max_backtracks must be >= 1");
  gae.validate();
}

double surrogate_improvement(const GaussianMlpPolicy& candidate,
                             const std::vector<Vec>& states,
                             const std::vector<Vec>& actions_raw,
                             const std::vector<double>& old_log_probs,
                             const std::vector<double>& weights,
                             std::int64_t n_episodes) {
  const double gain = ratio_minus_one_weighted_sum(candidate, states, actions_raw,
                                                   old_log_probs, weights);
  return gain / static_cast<double>(n_episodes);
}

TrpoStepResult trpo_step(GaussianMlpPolicy& policy,
                         const std::vector<Trajectory>& trajs, Mlp& value_net,
                         const TrpoConfig& cfg) {
  cfg.validate();
  if (trajs.empty()) throw std::invalid_argument("trpo_step: empty batch");

  TrpoStepResult result;
  const FlatBatch batch = flatten(trajs);
  const ValueFn value = [&](const Vec& s) { return value_net.forward(s)[0]; };

  std::vector<std::vector<double>> advantages;
  if (cfg.fit_baseline_first) {
    const auto targets = return_targets(trajs, cfg.gae.gamma, value);
    result.baseline =
        fit_baseline(value_net, batch.states, flatten_weights(targets),
                     cfg.delta_v, cfg.cg_iterations, cfg.baseline_damping);
    advantages = gae_advantages(trajs, value, cfg.gae);
  } else {
    advantages = gae_advantages(trajs, value, cfg.gae);
    const auto targets = return_targets(trajs, cfg.gae.gamma, value);
    result.baseline =
        fit_baseline(value_net, batch.states, flatten_weights(targets),
                     cfg.delta_v, cfg.cg_iterations, cfg.baseline_damping);
  }
  standardize(advantages);

  if (cfg.discounted_state_weighting) {
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      double discount = 1.0;
      for (int t = 0; t < trajs[i].length(); ++t) {
        advantages[i][t] *= discount;
        discount *= cfg.gae.gamma;
      }
    }
  }

  const std::vector<double> weights = flatten_weights(advantages);
  const double n_episodes = static_cast<double>(trajs.size());

  // Policy gradient of the surrogate at the current parameters: the
  // importance ratio is 1 there, so it reduces to the score-function form.
  const Vec grad =
      score_weighted_sum(policy, batch.states, batch.actions_raw, weights) /
      n_episodes;
  if (!grad.allFinite()) {
    throw std::runtime_error("trpo_step: non-finite policy gradient");
  }
  result.grad_norm = grad.norm();
  if (result.grad_norm < 1e-12) return result;  // nothing to do; keep theta

  const FvpContext fvp(policy, batch.states);
  const CgResult cg = conjugate_gradient(
      [&](const Eigen::Ref<const Vec>& v) { return fvp.apply(v, cfg.cg_damping); },
      grad, cfg.cg_iterations);

  const double g_dot_x = grad.dot(cg.x);
  result.g_dot_hinv_g = g_dot_x;
  if (cg.breakdown || !(g_dot_x > 0.0)) {
    return result;  // numerical FIM failure; reject the step
  }

  const Vec full_step = std::sqrt(2.0 * cfg.delta_d / g_dot_x) * cg.x;

  const Vec old_params = policy.flatten_params();
  const PolicySnapshot old_snap = snapshot_policy(policy, batch.states);
  std::vector<double> old_log_probs(batch.states.size());
  par::parallel_for(batch.states.size(), [&](std::size_t i) {
    old_log_probs[i] = policy.log_prob(batch.states[i], batch.actions_raw[i]);
  });

  double scale = 1.0;
  for (int l = 0; l < cfg.max_backtracks; ++l) {
    policy.set_params(old_params + scale * full_step);
    const double kl = mean_kl_vs_snapshot(policy, batch.states, old_snap);
    result.candidate_kls.push_back(kl);
    const double improvement = surrogate_improvement(
        policy, batch.states, batch.actions_raw, old_log_probs, weights,
        trajs.size());
    if (improvement >= 0.0 && kl <= cfg.delta_d) {
      result.accepted = true;
      result.backtracks_used = l;
      result.kl = kl;
      result.surrogate_improvement = improvement;
      return result;
    }
    scale *= cfg.backtrack_coeff;
  }

  policy.set_params(old_params);  // no candidate passed
  return result;
}

}  // namespace armrl
