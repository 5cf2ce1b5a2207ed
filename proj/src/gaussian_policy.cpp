#include "armrl/gaussian_policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "armrl/parallel.hpp"

namespace armrl {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2*pi)
}

GaussianMlpPolicy::GaussianMlpPolicy(Mlp mean_net, Vec action_low,
                                     Vec action_high)
    : mean_net_(std::move(mean_net)),
      log_std_(Vec::Zero(mean_net_.output_dim())),
      action_low_(std::move(action_low)),
      action_high_(std::move(action_high)) {
  if (action_low_.size() != action_dim() || action_high_.size() != action_dim()) {
    throw std::invalid_argument("GaussianMlpPolicy: action bounds must have the action dimension");
  }
}

Vec GaussianMlpPolicy::flatten_params() const {
  Vec flat(num_params());
  flat.head(mean_net_.num_params()) = mean_net_.flatten_params();
  flat.tail(action_dim()) = log_std_;
  return flat;
}

void GaussianMlpPolicy::set_params(const Eigen::Ref<const Vec>& flat) {
  if (flat.size() != num_params()) {
    throw std::invalid_argument("GaussianMlpPolicy::set_params: size mismatch");
  }
  mean_net_.set_params(flat.head(mean_net_.num_params()));
  log_std_ = flat.tail(action_dim());
}

Vec GaussianMlpPolicy::clamp_action(const Vec& raw) const {
  return raw.cwiseMax(action_low_).cwiseMin(action_high_);
}

GaussianMlpPolicy::Sample GaussianMlpPolicy::sample_action(const Vec& state,
                                                           Rng& rng) const {
  Sample s;
  s.raw = mean_net_.forward(state);
  for (int i = 0; i < action_dim(); ++i) {
    s.raw[i] += std::exp(log_std_[i]) * rng.normal();
  }
  s.clamped = clamp_action(s.raw);
  return s;
}

double GaussianMlpPolicy::log_prob(const Vec& state, const Vec& action_raw) const {
  const Vec mu = mean_net_.forward(state);
  double lp = -0.5 * action_dim() * kLog2Pi - log_std_.sum();
  for (int i = 0; i < action_dim(); ++i) {
    const double z = (action_raw[i] - mu[i]) * std::exp(-log_std_[i]);
    lp -= 0.5 * z * z;
  }
  return lp;
}

Vec GaussianMlpPolicy::log_prob_grad(const Vec& state, const Vec& action_raw) const {
  Mlp::Cache cache;
  const Vec& mu = mean_net_.forward(state, cache);
  Vec cot(action_dim());
  Vec grad = Vec::Zero(num_params());
  for (int i = 0; i < action_dim(); ++i) {
    const double inv_var = std::exp(-2.0 * log_std_[i]);
    const double diff = action_raw[i] - mu[i];
    cot[i] = diff * inv_var;
    grad[mean_net_.num_params() + i] = diff * diff * inv_var - 1.0;
  }
  mean_net_.backward_from_cache(cache, cot, grad.head(mean_net_.num_params()));
  return grad;
}

double GaussianMlpPolicy::entropy() const {
  return log_std_.sum() + 0.5 * action_dim() * (kLog2Pi + 1.0);
}

namespace {

// Closed-form diagonal-Gaussian KL(p || q) for one state.
double kl_closed_form(const Vec& mu_p, const Vec& log_std_p, const Vec& mu_q,
                      const Vec& log_std_q) {
  double kl = 0.0;
  for (int i = 0; i < mu_p.size(); ++i) {
    const double diff = mu_p[i] - mu_q[i];
    const double inv_var_q = std::exp(-2.0 * log_std_q[i]);
    kl += (log_std_q[i] - log_std_p[i]) +
          0.5 * (std::exp(2.0 * log_std_p[i]) + diff * diff) * inv_var_q - 0.5;
  }
  return kl;
}

}  // namespace

double GaussianMlpPolicy::kl_divergence(const Eigen::Ref<const Vec>& params_p,
                                        const Eigen::Ref<const Vec>& params_q,
                                        const std::vector<Vec>& states) const {
  GaussianMlpPolicy p = *this;
  GaussianMlpPolicy q = *this;
  p.set_params(params_p);
  q.set_params(params_q);
  const PolicySnapshot snap_q = snapshot_policy(q, states);
  return mean_kl_vs_snapshot(p, states, snap_q);
}

PolicySnapshot snapshot_policy(const GaussianMlpPolicy& policy,
                               const std::vector<Vec>& states) {
  PolicySnapshot snap;
  snap.means.resize(states.size());
  snap.log_std = policy.log_std();
  par::parallel_for(states.size(), [&](std::size_t i) {
    snap.means[i] = policy.mean_action(states[i]);
  });
  return snap;
}

double mean_kl_vs_snapshot(const GaussianMlpPolicy& policy,
                           const std::vector<Vec>& states,
                           const PolicySnapshot& old_snap) {
  if (states.empty()) return 0.0;
  const double total = par::block_reduce<double>(
      states.size(), [] { return 0.0; },
      [&](double& acc, std::size_t i) {
        const Vec mu = policy.mean_action(states[i]);
        acc += kl_closed_form(mu, policy.log_std(), old_snap.means[i],
                              old_snap.log_std);
      },
      [](double& total, const double& part) { total += part; });
  return total / static_cast<double>(states.size());
}

Vec mean_kl_grad_vs_snapshot(const GaussianMlpPolicy& policy,
                             const std::vector<Vec>& states,
                             const PolicySnapshot& old_snap) {
  const int n_net = policy.mean_net().num_params();
  const int n_a = policy.action_dim();
  const double inv_n = 1.0 / static_cast<double>(states.size());

  Vec grad = par::block_reduce<Vec>(
      states.size(), [&] { return Vec(Vec::Zero(policy.num_params())); },
      [&](Vec& acc, std::size_t i) {
        Mlp::Cache cache;
        const Vec& mu = policy.mean_net().forward(states[i], cache);
        Vec cot(n_a);
        for (int d = 0; d < n_a; ++d) {
          const double inv_var_q = std::exp(-2.0 * old_snap.log_std[d]);
          cot[d] = (mu[d] - old_snap.means[i][d]) * inv_var_q;
          // d/d log_std_p of the per-state KL.
          acc[n_net + d] += -1.0 + std::exp(2.0 * (policy.log_std()[d] -
                                                   old_snap.log_std[d]));
        }
        policy.mean_net().backward_from_cache(cache, cot, acc.head(n_net));
      },
      [](Vec& total, const Vec& part) { total += part; });
  return grad * inv_n;
}

Vec score_weighted_sum_serial(const GaussianMlpPolicy& policy,
                              const std::vector<Vec>& states,
                              const std::vector<Vec>& actions_raw,
                              const std::vector<double>& weights) {
  Vec total = Vec::Zero(policy.num_params());
  for (std::size_t i = 0; i < states.size(); ++i) {
    total += weights[i] * policy.log_prob_grad(states[i], actions_raw[i]);
  }
  return total;
}

Vec score_weighted_sum(const GaussianMlpPolicy& policy,
                       const std::vector<Vec>& states,
                       const std::vector<Vec>& actions_raw,
                       const std::vector<double>& weights) {
  const int n_net = policy.mean_net().num_params();
  const int n_a = policy.action_dim();
  Vec inv_var(n_a);
  for (int d = 0; d < n_a; ++d) inv_var[d] = std::exp(-2.0 * policy.log_std()[d]);

  return par::block_reduce<Vec>(
      states.size(), [&] { return Vec(Vec::Zero(policy.num_params())); },
      [&](Vec& acc, std::size_t i) {
        Mlp::Cache cache;
        const Vec& mu = policy.mean_net().forward(states[i], cache);
        const double w = weights[i];
        Vec cot(n_a);
        for (int d = 0; d < n_a; ++d) {
          const double diff = actions_raw[i][d] - mu[d];
          cot[d] = w * diff * inv_var[d];
          acc[n_net + d] += w * (diff * diff * inv_var[d] - 1.0);
        }
        policy.mean_net().backward_from_cache(cache, cot, acc.head(n_net));
      },
      [](Vec& total, const Vec& part) { total += part; });
}

double ratio_minus_one_weighted_sum(const GaussianMlpPolicy& policy,
                                    const std::vector<Vec>& states,
                                    const std::vector<Vec>& actions_raw,
                                    const std::vector<double>& old_log_probs,
                                    const std::vector<double>& weights) {
  return par::block_reduce<double>(
      states.size(), [] { return 0.0; },
      [&](double& acc, std::size_t i) {
        const double lp = policy.log_prob(states[i], actions_raw[i]);
        acc += weights[i] * (std::exp(lp - old_log_probs[i]) - 1.0);
      },
      [](double& total, const double& part) { total += part; });
}

FvpContext::FvpContext(const GaussianMlpPolicy& policy,
                       const std::vector<Vec>& states)
    : policy_(policy), caches_(states.size()) {
  par::parallel_for(states.size(), [&](std::size_t i) {
    policy_.mean_net().forward(states[i], caches_[i]);
  });
  inv_var_ = (-2.0 * policy_.log_std().array()).exp().matrix();
}

namespace {

Vec fvp_finalize(const GaussianMlpPolicy& policy, const Vec& sum_net,
                 std::size_t n_states, const Eigen::Ref<const Vec>& v,
                 double damping) {
  const int n_net = policy.mean_net().num_params();
  const int n_a = policy.action_dim();
  Vec out(policy.num_params());
  out.head(n_net) = sum_net / static_cast<double>(n_states);
  // The log_std block of the KL Hessian is state-independent: 2 per dim.
  out.tail(n_a) = 2.0 * v.tail(n_a);
  out += damping * v;
  if (!out.allFinite()) {
    throw std::runtime_error("fisher_vector_product: non-finite result");
  }
  return out;
}

}  // namespace

Vec FvpContext::apply(const Eigen::Ref<const Vec>& v, double damping) const {
  const int n_net = policy_.mean_net().num_params();
  const Vec sum_net = par::block_reduce<Vec>(
      caches_.size(), [&] { return Vec(Vec::Zero(n_net)); },
      [&](Vec& acc, std::size_t i) {
        const Vec u = policy_.mean_net().param_jvp(caches_[i], v.head(n_net));
        policy_.mean_net().backward_from_cache(caches_[i],
                                               u.cwiseProduct(inv_var_), acc);
      },
      [](Vec& total, const Vec& part) { total += part; });
  return fvp_finalize(policy_, sum_net, caches_.size(), v, damping);
}

Vec FvpContext::apply_serial(const Eigen::Ref<const Vec>& v,
                             double damping) const {
  const int n_net = policy_.mean_net().num_params();
  Vec sum_net = Vec::Zero(n_net);
  for (std::size_t i = 0; i < caches_.size(); ++i) {
    const Vec u = policy_.mean_net().param_jvp(caches_[i], v.head(n_net));
    policy_.mean_net().backward_from_cache(caches_[i],
                                           u.cwiseProduct(inv_var_), sum_net);
  }
  return fvp_finalize(policy_, sum_net, caches_.size(), v, damping);
}

Vec fisher_vector_product(const GaussianMlpPolicy& policy,
                          const std::vector<Vec>& states,
                          const Eigen::Ref<const Vec>& v, double damping) {
  return FvpContext(policy, states).apply(v, damping);
}

}  // namespace armrl
