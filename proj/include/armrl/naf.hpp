#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "armrl/adam.hpp"
#include "armrl/env.hpp"
#include "armrl/estimation.hpp"
#include "armrl/mlp.hpp"
#include "armrl/rng.hpp"

namespace armrl {

// Q-network with a normalized (quadratic) advantage: one MLP trunk whose
// output packs [mu (n_a), V (1), l (n_a(n_a+1)/2 lower-triangle entries)].
// L is lower-triangular with exponentiated diagonal, P = L L^T, and
// Q(s, a) = V(s) - 1/2 (a - mu)^T P(s) (a - mu), so argmax_a Q = mu(s) and
// P is positive definite by construction.
class NafNetwork {
 public:
  NafNetwork() = default;
  // hidden activation is relu per the Q-network convention.
  NafNetwork(int state_dim, int action_dim, const std::vector<int>& hidden_sizes);

  static int packed_l_dim(int action_dim) {
    return action_dim * (action_dim + 1) / 2;
  }

  int state_dim() const { return net_.input_dim(); }
  int action_dim() const { return action_dim_; }
  int num_params() const { return net_.num_params(); }

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  void init_params(Rng& rng) { net_.init_params(rng); }
  Vec flatten_params() const { return net_.flatten_params(); }
  void set_params(const Eigen::Ref<const Vec>& flat) { net_.set_params(flat); }

  struct Heads {
    Vec mu;
    double value = 0.0;
    Mat L;  // lower-triangular, positive diagonal
    Mat P;  // L L^T
  };
  Heads heads(const Vec& state) const;
  static Heads unpack(const Eigen::Ref<const Vec>& raw_output, int action_dim);

  Vec mu(const Vec& state) const;
  double value(const Vec& state) const;
  double q_value(const Vec& state, const Vec& action) const;

 private:
  Mlp net_;
  int action_dim_ = 0;
};

// Bounded FIFO transition store with uniform (with-replacement) sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return ring_.size(); }

  void add(Transition tr);
  const Transition& sample_one(Rng& rng) const;
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // eviction cursor once full
  std::vector<Transition> ring_;
};

struct NafConfig {
  std::vector<int> hidden_sizes{100, 100};
  int minibatch_size = 64;        // N_b
  int critic_fits_per_step = 5;   // K_Q
  double soft_update_coeff = 1e-3;  // xi
  double reward_scale = 1.0;      // r_s, applied inside the TD target only
  double gamma = 0.99;
  double learning_rate = 1e-3;
  std::size_t buffer_capacity = 1000000;
  int warmup_transitions = 1000;
  // Exploration noise std per dimension: starts at
  // noise_start_frac * (high - low), decays linearly to noise_end (absolute)
  // over noise_decay_episodes (0 = the full run).
  double noise_start_frac = 0.1;
  double noise_end = 0.01;
  int noise_decay_episodes = 0;

  void validate() const;
};

// theta_target <- xi * theta_online + (1 - xi) * theta_target, elementwise.
void soft_update(Eigen::Ref<Vec> target_params,
                 const Eigen::Ref<const Vec>& online_params, double xi);

// TD targets y_i = r_s * r_i + gamma * (1 - terminal_i) * V_target(s'_i).
// Exposed separately so tests can probe the reward-scaling behavior.
std::vector<double> naf_targets(const NafNetwork& target_net,
                                const std::vector<const Transition*>& minibatch,
                                double gamma, double reward_scale);

// Mean squared TD loss of the minibatch and its parameter gradient (targets
// held constant).
double naf_td_loss(const NafNetwork& net,
                   const std::vector<const Transition*>& minibatch,
                   const std::vector<double>& targets);
Vec naf_td_gradient(const NafNetwork& net,
                    const std::vector<const Transition*>& minibatch,
                    const std::vector<double>& targets);
Vec naf_td_gradient_serial(const NafNetwork& net,
                           const std::vector<const Transition*>& minibatch,
                           const std::vector<double>& targets);

// One Adam step on the TD loss; returns the pre-step loss value.
double critic_update(NafNetwork& net, const NafNetwork& target_net,
                     const std::vector<const Transition*>& minibatch,
                     double gamma, double reward_scale, AdamState& adam);

// a = clamp(mu(s) + noise_std .* z, bounds); noise_std = 0 reproduces the
// plain greedy policy.
Vec naf_act(const NafNetwork& net, const Vec& state, const Vec& noise_std,
            const Vec& low, const Vec& high, Rng& rng);

struct NafEvalHook {
  // Called after each evaluation with the fresh curve row and the networks.
  std::function<void(const CurveRow&, const EvalStats&, const NafNetwork& online,
                     const NafNetwork& target)>
      on_eval;
};

struct NafTrainResult {
  std::vector<CurveRow> curve;
  NafNetwork online;
  NafNetwork target;
  std::int64_t total_timesteps = 0;
};

// Full training loop: per timestep act / store, then K_Q critic fits each
// followed by a soft target update. Evaluates the noise-free policy every
// eval_every episodes (plus once before training).
NafTrainResult naf_train(const Env& env, const NafConfig& cfg,
                         std::uint64_t master_seed, int max_episodes,
                         int eval_every, int eval_episodes,
                         const NafEvalHook& hook = {});

}  // namespace armrl
