#include "armrl/naf.hpp"

#include <cmath>
#include <stdexcept>

#include "armrl/parallel.hpp"

namespace armrl {

NafNetwork::NafNetwork(int state_dim, int action_dim,
                       const std::vector<int>& hidden_sizes)
    : action_dim_(action_dim) {
  std::vector<int> sizes;
  sizes.push_back(state_dim);
  sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  sizes.push_back(action_dim + 1 + packed_l_dim(action_dim));
  net_ = Mlp(sizes, Activation::kRelu);
}

NafNetwork::Heads NafNetwork::unpack(const Eigen::Ref<const Vec>& raw,
                                     int action_dim) {
  Heads h;
  h.mu = raw.head(action_dim);
  h.value = raw[action_dim];
  h.L = Mat::Zero(action_dim, action_dim);
  int idx = action_dim + 1;
  for (int j = 0; j < action_dim; ++j) {
    for (int k = 0; k <= j; ++k, ++idx) {
      h.L(j, k) = (j == k) ? std::exp(raw[idx]) : raw[idx];
    }
  }
  h.P = h.L * h.L.transpose();
  return h;
}

NafNetwork::Heads NafNetwork::heads(const Vec& state) const {
  return unpack(net_.forward(state), action_dim_);
}

Vec NafNetwork::mu(const Vec& state) const {
  return net_.forward(state).head(action_dim_);
}

double NafNetwork::value(const Vec& state) const {
  return net_.forward(state)[action_dim_];
}

double NafNetwork::q_value(const Vec& state, const Vec& action) const {
  const Heads h = heads(state);
  const Vec d = action - h.mu;
  const Vec w = h.L.transpose() * d;
  return h.value - 0.5 * w.squaredNorm();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  ring_.reserve(std::min<std::size_t>(capacity_, 1 << 20));
}

void ReplayBuffer::add(Transition tr) {
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(tr));
  } else {
    ring_[next_] = std::move(tr);
    next_ = (next_ + 1) % capacity_;
  }
}

const Transition& ReplayBuffer::sample_one(Rng& rng) const {
  if (ring_.empty()) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
  return ring_[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(ring_.size()) - 1))];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<const Transition*> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(&sample_one(rng));
  return out;
}

void NafConfig::validate() const {
  if (minibatch_size < 1) throw std::invalid_argument("NafConfig: minibatch_size must be >= 1");
  if (!(soft_update_coeff > 0.0 && soft_update_coeff <= 1.0)) {
    throw std::invalid_argument("NafConfig: soft_update_coeff must lie in (0,1]");
  }
  if (critic_fits_per_step < 0) throw std::invalid_argument("NafConfig: critic_fits_per_step must be >= 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("NafConfig: gamma must lie in [0,1)");
  if (buffer_capacity == 0) throw std::invalid_argument("NafConfig: buffer_capacity must be positive");
  if (hidden_sizes.empty()) throw std::invalid_argument("NafConfig: hidden_sizes must be non-empty");
}

void soft_update(Eigen::Ref<Vec> target_params,
                 const Eigen::Ref<const Vec>& online_params, double xi) {
  if (target_params.size() != online_params.size()) {
    throw std::invalid_argument("soft_update: size mismatch");
  }
  for (Eigen::Index i = 0; i < target_params.size(); ++i) {
    target_params[i] = xi * online_params[i] + (1.0 - xi) * target_params[i];
  }
}

std::vector<double> naf_targets(const NafNetwork& target_net,
                                const std::vector<const Transition*>& minibatch,
                                double gamma, double reward_scale) {
  std::vector<double> y(minibatch.size());
  par::parallel_for(minibatch.size(), [&](std::size_t i) {
    const Transition& tr = *minibatch[i];
    // No bootstrap past a terminal state.
    y[i] = reward_scale * tr.r +
           (tr.terminal ? 0.0 : gamma * target_net.value(tr.s_next));
  });
  return y;
}

namespace {

// Cotangent of the packed network output for one sample, given dL/dQ.
Vec output_cotangent(const NafNetwork::Heads& h, const Vec& action,
                     double dl_dq, int n_a) {
  const Vec d = action - h.mu;
  const Vec w = h.L.transpose() * d;
  Vec cot = Vec::Zero(n_a + 1 + NafNetwork::packed_l_dim(n_a));
  cot.head(n_a) = dl_dq * (h.P * d);  // dQ/dmu = P (a - mu)
  cot[n_a] = dl_dq;                   // dQ/dV = 1
  int idx = n_a + 1;
  for (int j = 0; j < n_a; ++j) {
    for (int k = 0; k <= j; ++k, ++idx) {
      const double dq_dl = -d[j] * w[k];  // dQ/dL_jk
      cot[idx] = dl_dq * dq_dl * (j == k ? h.L(j, j) : 1.0);
    }
  }
  return cot;
}

}  // namespace

double naf_td_loss(const NafNetwork& net,
                   const std::vector<const Transition*>& minibatch,
                   const std::vector<double>& targets) {
  const double sum = par::block_reduce<double>(
      minibatch.size(), [] { return 0.0; },
      [&](double& acc, std::size_t i) {
        const double err = targets[i] - net.q_value(minibatch[i]->s, minibatch[i]->a_env);
        acc += err * err;
      },
      [](double& t, const double& p) { t += p; });
  return sum / static_cast<double>(minibatch.size());
}

Vec naf_td_gradient(const NafNetwork& net,
                    const std::vector<const Transition*>& minibatch,
                    const std::vector<double>& targets) {
  const int n_a = net.action_dim();
  const double inv_n = 1.0 / static_cast<double>(minibatch.size());
  return par::block_reduce<Vec>(
      minibatch.size(), [&] { return Vec(Vec::Zero(net.num_params())); },
      [&](Vec& acc, std::size_t i) {
        const Transition& tr = *minibatch[i];
        Mlp::Cache cache;
        const Vec& raw = net.net().forward(tr.s, cache);
        const NafNetwork::Heads h = NafNetwork::unpack(raw, n_a);
        const Vec diff = tr.a_env - h.mu;
        const double q = h.value - 0.5 * (h.L.transpose() * diff).squaredNorm();
        const double dl_dq = -2.0 * inv_n * (targets[i] - q);
        net.net().backward_from_cache(cache, output_cotangent(h, tr.a_env, dl_dq, n_a),
                                      acc);
      },
      [](Vec& total, const Vec& part) { total += part; });
}

Vec naf_td_gradient_serial(const NafNetwork& net,
                           const std::vector<const Transition*>& minibatch,
                           const std::vector<double>& targets) {
  const int n_a = net.action_dim();
  const double inv_n = 1.0 / static_cast<double>(minibatch.size());
  Vec total = Vec::Zero(net.num_params());
  for (std::size_t i = 0; i < minibatch.size(); ++i) {
    const Transition& tr = *minibatch[i];
    Mlp::Cache cache;
    const Vec& raw = net.net().forward(tr.s, cache);
    const NafNetwork::Heads h = NafNetwork::unpack(raw, n_a);
    const Vec diff = tr.a_env - h.mu;
    const double q = h.value - 0.5 * (h.L.transpose() * diff).squaredNorm();
    const double dl_dq = -2.0 * inv_n * (targets[i] - q);
    net.net().backward_from_cache(cache, output_cotangent(h, tr.a_env, dl_dq, n_a),
                                  total);
  }
  return total;
}

double critic_update(NafNetwork& net, const NafNetwork& target_net,
                     const std::vector<const Transition*>& minibatch,
                     double gamma, double reward_scale, AdamState& adam) {
  if (minibatch.empty()) throw std::invalid_argument("critic_update: empty minibatch");
  const std::vector<double> y = naf_targets(target_net, minibatch, gamma, reward_scale);
  const double loss = naf_td_loss(net, minibatch, y);
  if (!std::isfinite(loss)) {
    throw std::runtime_error("critic_update: non-finite TD loss");
  }
  const Vec grad = naf_td_gradient(net, minibatch, y);
  Vec params = net.flatten_params();
  adam_step(params, grad, adam);
  net.set_params(params);
  return loss;
}

Vec naf_act(const NafNetwork& net, const Vec& state, const Vec& noise_std,
            const Vec& low, const Vec& high, Rng& rng) {
  Vec a = net.mu(state);
  for (int i = 0; i < net.action_dim(); ++i) {
    if (noise_std[i] > 0.0) a[i] += noise_std[i] * rng.normal();
  }
  return a.cwiseMax(low).cwiseMin(high);
}

NafTrainResult naf_train(const Env& env, const NafConfig& cfg,
                         std::uint64_t master_seed, int max_episodes,
                         int eval_every, int eval_episodes,
                         const NafEvalHook& hook) {
  cfg.validate();
  NafTrainResult result;
  Rng init_rng = substream(master_seed, "policy-init");
  result.online = NafNetwork(env.obs_dim(), env.action_dim(), cfg.hidden_sizes);
  result.online.init_params(init_rng);
  result.target = result.online;  // exact copy at t = 0

  AdamState adam(result.online.num_params(), cfg.learning_rate);
  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng buffer_rng = substream(master_seed, "replay");

  const Vec low = env.action_low();
  const Vec high = env.action_high();
  const Vec noise_start = cfg.noise_start_frac * (high - low);
  const int decay_episodes =
      cfg.noise_decay_episodes > 0 ? cfg.noise_decay_episodes : max_episodes;

  std::int64_t eval_index = 0;
  const auto evaluate = [&](std::int64_t episodes_done) {
    const NafNetwork& net = result.online;
    const DeterministicPolicy act = [&](const Vec& s) {
      return net.mu(s).cwiseMax(low).cwiseMin(high);
    };
    Rng eval_rng = substream(master_seed, "eval", static_cast<std::uint64_t>(eval_index));
    const EvalStats stats = evaluate_policy(act, env, eval_episodes, eval_rng);
    CurveRow row;
    row.iteration = eval_index;
    row.total_episodes = episodes_done;
    row.total_timesteps = result.total_timesteps;
    row.mean_return = stats.mean_return;
    row.std_return = stats.std_return;
    row.success_rate = stats.success_rate;
    result.curve.push_back(row);
    if (hook.on_eval) hook.on_eval(row, stats, result.online, result.target);
    eval_index += 1;
  };

  evaluate(0);  // initial policy

  Vec target_params = result.target.flatten_params();
  for (int episode = 0; episode < max_episodes; ++episode) {
    Rng env_rng = substream(master_seed, "env", static_cast<std::uint64_t>(episode));
    Rng expl_rng = substream(master_seed, "exploration", static_cast<std::uint64_t>(episode));

    const double decay = std::min(
        1.0, static_cast<double>(episode) / static_cast<double>(decay_episodes));
    const Vec noise_std =
        ((1.0 - decay) * noise_start.array() + decay * cfg.noise_end)
            .max(cfg.noise_end)
            .matrix();

    const std::unique_ptr<Env> episode_env = env.clone();
    Vec obs = episode_env->reset(env_rng);
    for (int t = 0; t < episode_env->horizon(); ++t) {
      const Vec action = naf_act(result.online, obs, noise_std, low, high, expl_rng);
      const StepResult r = episode_env->step(action);
      result.total_timesteps += 1;

      Transition tr;
      tr.s = obs;
      tr.a_raw = action;
      tr.a_env = action;
      tr.r = r.reward;  // stored unscaled; r_s applies inside the update only
      tr.s_next = r.obs;
      // True task terminals stop the bootstrap; horizon truncation does not.
      tr.terminal = r.info.success || r.info.bad_terminal;
      tr.t = t;
      tr.info = r.info;
      buffer.add(std::move(tr));

      if (buffer.size() >= static_cast<std::size_t>(
                               std::max(cfg.warmup_transitions, cfg.minibatch_size))) {
        for (int k = 0; k < cfg.critic_fits_per_step; ++k) {
          const auto minibatch =
              buffer.sample(static_cast<std::size_t>(cfg.minibatch_size), buffer_rng);
          critic_update(result.online, result.target, minibatch, cfg.gamma,
                        cfg.reward_scale, adam);
          soft_update(target_params, result.online.flatten_params(),
                      cfg.soft_update_coeff);
          result.target.set_params(target_params);
        }
      }

      if (r.terminal) break;
      obs = r.obs;
    }

    if ((episode + 1) % eval_every == 0 || episode + 1 == max_episodes) {
      evaluate(episode + 1);
    }
  }
  return result;
}

}  // namespace armrl
