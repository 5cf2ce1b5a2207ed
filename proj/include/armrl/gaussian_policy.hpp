#pragma once

#include <vector>

#include "armrl/mlp.hpp"
#include "armrl/rng.hpp"

namespace armrl {

// Diagonal-Gaussian stochastic policy: a ~ N(mu(s), diag(exp(2*log_std))).
// The mean is an MLP; log_std is a free state-independent parameter vector.
// The flat parameter vector is [mean-net params, log_std].
class GaussianMlpPolicy {
 public:
  GaussianMlpPolicy() = default;
  GaussianMlpPolicy(Mlp mean_net, Vec action_low, Vec action_high);

  int state_dim() const { return mean_net_.input_dim(); }
  int action_dim() const { return mean_net_.output_dim(); }
  int num_params() const { return mean_net_.num_params() + action_dim(); }

  const Mlp& mean_net() const { return mean_net_; }
  Mlp& mean_net() { return mean_net_; }
  const Vec& log_std() const { return log_std_; }
  Vec& log_std() { return log_std_; }
  const Vec& action_low() const { return action_low_; }
  const Vec& action_high() const { return action_high_; }

  Vec flatten_params() const;
  void set_params(const Eigen::Ref<const Vec>& flat);

  Vec mean_action(const Vec& state) const { return mean_net_.forward(state); }
  Vec clamp_action(const Vec& raw) const;

  // a_raw = mu(s) + exp(log_std) .* z. The raw draw feeds log_prob; the
  // clamped one is what the environment executes.
  struct Sample {
    Vec raw;
    Vec clamped;
  };
  Sample sample_action(const Vec& state, Rng& rng) const;

  // Exact diagonal-Gaussian log density of a raw (unclamped) action.
  double log_prob(const Vec& state, const Vec& action_raw) const;

  // d log_prob / d params, flattened (mean-net block then log_std block).
  Vec log_prob_grad(const Vec& state, const Vec& action_raw) const;

  // Differential entropy (state-independent for this family).
  double entropy() const;

  // Mean over `states` of KL(pi_params_p || pi_params_q) on this architecture.
  double kl_divergence(const Eigen::Ref<const Vec>& params_p,
                       const Eigen::Ref<const Vec>& params_q,
                       const std::vector<Vec>& states) const;

 private:
  Mlp mean_net_;
  Vec log_std_;
  Vec action_low_;
  Vec action_high_;
};

// Frozen behavior of a policy on a state batch: the per-state means and the
// log_std at the time of the snapshot. Line search and FVPs measure KL
// against this instead of re-running the old network.
struct PolicySnapshot {
  std::vector<Vec> means;
  Vec log_std;
};

PolicySnapshot snapshot_policy(const GaussianMlpPolicy& policy,
                               const std::vector<Vec>& states);

// Mean over the batch of KL(pi_current || snapshot).
double mean_kl_vs_snapshot(const GaussianMlpPolicy& policy,
                           const std::vector<Vec>& states,
                           const PolicySnapshot& old_snap);

// Gradient of mean_kl_vs_snapshot with respect to the policy's current
// parameters. Test oracle for the Fisher-vector product; also exercised by the
// FVP finite-difference checks.
Vec mean_kl_grad_vs_snapshot(const GaussianMlpPolicy& policy,
                             const std::vector<Vec>& states,
                             const PolicySnapshot& old_snap);

// sum_i weights[i] * d log pi(actions[i] | states[i]) / d params.
// The parallel version reduces fixed-size blocks in a fixed order, so its
// result does not depend on the thread count.
Vec score_weighted_sum(const GaussianMlpPolicy& policy,
                       const std::vector<Vec>& states,
                       const std::vector<Vec>& actions_raw,
                       const std::vector<double>& weights);
Vec score_weighted_sum_serial(const GaussianMlpPolicy& policy,
                              const std::vector<Vec>& states,
                              const std::vector<Vec>& actions_raw,
                              const std::vector<double>& weights);

// sum_i weights[i] * (exp(log pi(a_i|s_i) - old_log_probs[i]) - 1); the
// importance-weighted surrogate gain used by the TRPO line search. Each term
// vanishes exactly when the policy reproduces old_log_probs, so the sum is
// exactly zero at the data-collecting parameters.
double ratio_minus_one_weighted_sum(const GaussianMlpPolicy& policy,
                                    const std::vector<Vec>& states,
                                    const std::vector<Vec>& actions_raw,
                                    const std::vector<double>& old_log_probs,
                                    const std::vector<double>& weights);

// Matrix-free product with the Hessian of the mean KL at the current
// parameters (the Fisher information metric): returns (H + damping I) v.
// The context precomputes per-state forward caches so CG can apply the
// operator repeatedly without redoing forward passes.
class FvpContext {
 public:
  FvpContext(const GaussianMlpPolicy& policy, const std::vector<Vec>& states);

  Vec apply(const Eigen::Ref<const Vec>& v, double damping) const;
  Vec apply_serial(const Eigen::Ref<const Vec>& v, double damping) const;

 private:
  const GaussianMlpPolicy& policy_;
  std::vector<Mlp::Cache> caches_;
  Vec inv_var_;  // exp(-2 log_std)
};

Vec fisher_vector_product(const GaussianMlpPolicy& policy,
                          const std::vector<Vec>& states,
                          const Eigen::Ref<const Vec>& v, double damping);

}  // namespace armrl
