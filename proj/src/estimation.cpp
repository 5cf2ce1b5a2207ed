#include "armrl/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "armrl/cg.hpp"
#include "armrl/parallel.hpp"

namespace armrl {

void Trajectory::push(Transition tr) {
  if (!transitions.empty() && transitions.back().terminal) {
    throw std::logic_error("Trajectory::push: episode already terminated");
  }
  const int expected_t = static_cast<int>(transitions.size());
  if (tr.t != expected_t) {
    throw std::logic_error("Trajectory::push: non-contiguous timestep");
  }
  total_reward += tr.r;
  transitions.push_back(std::move(tr));
}

void Trajectory::validate() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (transitions[i].t != static_cast<int>(i)) {
      throw std::logic_error("Trajectory: non-contiguous timesteps");
    }
    if (transitions[i].terminal && i + 1 != transitions.size()) {
      throw std::logic_error("Trajectory: terminal transition mid-episode");
    }
    sum += transitions[i].r;
  }
  if (std::abs(sum - total_reward) > 1e-9 * std::max(1.0, std::abs(sum))) {
    throw std::logic_error("Trajectory: total_reward does not match reward sum");
  }
}

void GaeConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("GaeConfig: gamma must lie in (0,1)");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("GaeConfig: lambda must lie in [0,1]");
  }
}

double discounted_return(const Trajectory& traj, double gamma, int from_t) {
  if (from_t < 0 || from_t >= traj.length()) {
    throw std::out_of_range("discounted_return: from_t outside trajectory");
  }
  double sum = 0.0;
  double discount = 1.0;
  for (int k = from_t; k < traj.length(); ++k) {
    sum += discount * traj.transitions[k].r;
    discount *= gamma;
  }
  return sum;
}

std::vector<std::vector<double>> gae_advantages(
    const std::vector<Trajectory>& trajs, const ValueFn& value_fn,
    const GaeConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<double>> advantages(trajs.size());
  par::parallel_for(trajs.size(), [&](std::size_t i) {
    const Trajectory& traj = trajs[i];
    const int T = traj.length();
    std::vector<double>& adv = advantages[i];
    adv.assign(T, 0.0);
    if (T == 0) return;

    std::vector<double> values(T + 1);
    for (int t = 0; t < T; ++t) values[t] = value_fn(traj.transitions[t].s);
    // Bootstrap past the end: 0 after a terminal, V(s_T) when truncated.
    values[T] =
        traj.terminated() ? 0.0 : value_fn(traj.transitions.back().s_next);

    double gae = 0.0;
    for (int t = T - 1; t >= 0; --t) {
      const double nonterminal = traj.transitions[t].terminal ? 0.0 : 1.0;
      const double delta = traj.transitions[t].r +
                           cfg.gamma * values[t + 1] * nonterminal - values[t];
      gae = delta + cfg.gamma * cfg.lambda * nonterminal * gae;
      adv[t] = gae;
    }
  });
  return advantages;
}

std::vector<std::vector<double>> return_targets(
    const std::vector<Trajectory>& trajs, double gamma,
    const ValueFn& value_fn) {
  std::vector<std::vector<double>> targets(trajs.size());
  par::parallel_for(trajs.size(), [&](std::size_t i) {
    const Trajectory& traj = trajs[i];
    const int T = traj.length();
    targets[i].assign(T, 0.0);
    if (T == 0) return;
    double acc =
        traj.terminated() ? 0.0 : value_fn(traj.transitions.back().s_next);
    for (int t = T - 1; t >= 0; --t) {
      acc = traj.transitions[t].r + gamma * acc;
      targets[i][t] = acc;
    }
  });
  return targets;
}

std::pair<double, double> standardize(std::vector<std::vector<double>>& values) {
  std::size_t n = 0;
  double sum = 0.0;
  for (const auto& row : values) {
    n += row.size();
    for (const double v : row) sum += v;
  }
  if (n == 0) return {0.0, 0.0};
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const auto& row : values) {
    for (const double v : row) sq += (v - mean) * (v - mean);
  }
  const double std_dev = std::sqrt(sq / static_cast<double>(n));
  const double scale = std_dev > 1e-12 ? 1.0 / std_dev : 1.0;
  for (auto& row : values) {
    for (double& v : row) v = (v - mean) * scale;
  }
  return {mean, std_dev};
}

GaussNewtonContext::GaussNewtonContext(const Mlp& net,
                                       const std::vector<Vec>& states)
    : net_(net), caches_(states.size()) {
  if (net.output_dim() != 1) {
    throw std::invalid_argument("GaussNewtonContext: net must be scalar-valued");
  }
  par::parallel_for(states.size(), [&](std::size_t i) {
    net_.forward(states[i], caches_[i]);
  });
}

namespace {

Vec gn_finalize(const Vec& sum, std::size_t n, const Eigen::Ref<const Vec>& v,
                double damping) {
  Vec out = sum * (2.0 / static_cast<double>(n));
  out += damping * v;
  if (!out.allFinite()) {
    throw std::runtime_error("GaussNewtonContext: non-finite result");
  }
  return out;
}

}  // namespace

Vec GaussNewtonContext::apply(const Eigen::Ref<const Vec>& v,
                              double damping) const {
  const Vec sum = par::block_reduce<Vec>(
      caches_.size(), [&] { return Vec(Vec::Zero(net_.num_params())); },
      [&](Vec& acc, std::size_t i) {
        const Vec u = net_.param_jvp(caches_[i], v);  // scalar tangent
        net_.backward_from_cache(caches_[i], u, acc);
      },
      [](Vec& total, const Vec& part) { total += part; });
  return gn_finalize(sum, caches_.size(), v, damping);
}

Vec GaussNewtonContext::apply_serial(const Eigen::Ref<const Vec>& v,
                                     double damping) const {
  Vec sum = Vec::Zero(net_.num_params());
  for (std::size_t i = 0; i < caches_.size(); ++i) {
    const Vec u = net_.param_jvp(caches_[i], v);
    net_.backward_from_cache(caches_[i], u, sum);
  }
  return gn_finalize(sum, caches_.size(), v, damping);
}

double value_mse(const Mlp& net, const std::vector<Vec>& states,
                 const std::vector<double>& targets) {
  const double sum = par::block_reduce<double>(
      states.size(), [] { return 0.0; },
      [&](double& acc, std::size_t i) {
        const double err = net.forward(states[i])[0] - targets[i];
        acc += err * err;
      },
      [](double& total, const double& part) { total += part; });
  return sum / static_cast<double>(states.size());
}

Vec value_mse_gradient(const Mlp& net, const std::vector<Vec>& states,
                       const std::vector<double>& targets) {
  const Vec sum = par::block_reduce<Vec>(
      states.size(), [&] { return Vec(Vec::Zero(net.num_params())); },
      [&](Vec& acc, std::size_t i) {
        Mlp::Cache cache;
        const Vec& out = net.forward(states[i], cache);
        Vec cot(1);
        cot[0] = out[0] - targets[i];
        net.backward_from_cache(cache, cot, acc);
      },
      [](Vec& total, const Vec& part) { total += part; });
  return sum * (2.0 / static_cast<double>(states.size()));
}

Vec value_mse_gradient_serial(const Mlp& net, const std::vector<Vec>& states,
                              const std::vector<double>& targets) {
  Vec sum = Vec::Zero(net.num_params());
  for (std::size_t i = 0; i < states.size(); ++i) {
    Mlp::Cache cache;
    const Vec& out = net.forward(states[i], cache);
    Vec cot(1);
    cot[0] = out[0] - targets[i];
    net.backward_from_cache(cache, cot, sum);
  }
  return sum * (2.0 / static_cast<double>(states.size()));
}

BaselineFitResult fit_baseline(Mlp& value_net, const std::vector<Vec>& states,
                               const std::vector<double>& targets,
                               double delta_v, int n_cg, double damping,
                               int max_halvings) {
  if (states.size() != targets.size()) {
    throw std::invalid_argument("fit_baseline: states/targets length mismatch");
  }
  BaselineFitResult result;
  if (states.empty()) return result;
  result.mse_before = value_mse(value_net, states, targets);
  result.mse_after = result.mse_before;

  const Vec grad = value_mse_gradient(value_net, states, targets);
  if (grad.norm() < 1e-12) return result;

  GaussNewtonContext gn(value_net, states);
  const CgResult cg = conjugate_gradient(
      [&](const Eigen::Ref<const Vec>& v) { return gn.apply(v, damping); },
      -grad, n_cg);
  if (cg.breakdown) {
    std::cerr << "fit_baseline: CG breakdown (zero curvature), skipping update\n";
    return result;
  }
  const double quad = cg.x.dot(-grad);  // x^T (G + damping I) x
  if (!(quad > 0.0) || !std::isfinite(quad)) {
    std::cerr << "fit_baseline: non-positive curvature, skipping update\n";
    return result;
  }

  const Vec params = value_net.flatten_params();
  Vec step = std::sqrt(2.0 * delta_v / quad) * cg.x;
  for (int h = 0; h <= max_halvings; ++h) {
    value_net.set_params(params + step);
    const double mse = value_mse(value_net, states, targets);
    if (mse <= result.mse_before) {
      result.updated = true;
      result.halvings = h;
      result.mse_after = mse;
      return result;
    }
    step *= 0.5;
  }
  value_net.set_params(params);  // every scaled step made it worse
  return result;
}

EvalStats evaluate_policy(const DeterministicPolicy& act, const Env& env,
                          int n_episodes, Rng& rng) {
  if (n_episodes < 1) {
    throw std::invalid_argument("evaluate_policy: n_episodes must be >= 1");
  }
  // Episode seeds are drawn sequentially up front so the parallel episode
  // loop cannot reorder consumption of the caller's stream.
  std::vector<std::uint64_t> seeds(n_episodes);
  for (auto& s : seeds) s = rng.next_u64();

  EvalStats stats;
  stats.returns.assign(n_episodes, 0.0);
  std::vector<int> lengths(n_episodes, 0);
  std::vector<int> successes(n_episodes, 0);
  std::vector<int> bad_terminals(n_episodes, 0);

  par::parallel_for(static_cast<std::size_t>(n_episodes), [&](std::size_t i) {
    const std::unique_ptr<Env> episode_env = env.clone();
    Rng episode_rng(seeds[i]);
    Vec obs = episode_env->reset(episode_rng);
    double ret = 0.0;
    for (int t = 0; t < episode_env->horizon(); ++t) {
      const StepResult r = episode_env->step(act(obs));
      ret += r.reward;
      lengths[i] += 1;
      if (r.terminal) {
        successes[i] = r.info.success ? 1 : 0;
        bad_terminals[i] = r.info.bad_terminal ? 1 : 0;
        break;
      }
      obs = r.obs;
    }
    stats.returns[i] = ret;
  });

  double sum = 0.0;
  for (const double r : stats.returns) sum += r;
  stats.mean_return = sum / n_episodes;
  double sq = 0.0;
  for (const double r : stats.returns) {
    sq += (r - stats.mean_return) * (r - stats.mean_return);
  }
  stats.std_return = std::sqrt(sq / n_episodes);  // population, divisor N
  for (int i = 0; i < n_episodes; ++i) {
    stats.success_rate += successes[i];
    stats.bad_terminal_rate += bad_terminals[i];
    stats.mean_length += lengths[i];
  }
  stats.success_rate /= n_episodes;
  stats.bad_terminal_rate /= n_episodes;
  stats.mean_length /= n_episodes;
  return stats;
}

RunSummary summarize_run(const std::vector<CurveRow>& curve) {
  if (curve.empty()) {
    throw std::invalid_argument("summarize_run: empty curve");
  }
  RunSummary summary;
  const std::size_t window =
      std::min<std::size_t>(10, curve.size());
  const std::size_t first = curve.size() - window;

  double sum = 0.0;
  for (std::size_t i = first; i < curve.size(); ++i) sum += curve[i].mean_return;
  summary.final_avg_return = sum / static_cast<double>(window);

  double sq = 0.0;
  for (std::size_t i = first; i < curve.size(); ++i) {
    const double d = curve[i].mean_return - summary.final_avg_return;
    sq += d * d;
  }
  summary.final_std = std::sqrt(sq / static_cast<double>(window));

  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].mean_return > curve[best].mean_return) best = i;
  }
  summary.max_return = curve[best].mean_return;
  summary.max_return_std = curve[best].std_return;

  const double threshold = summary.final_avg_return - summary.final_std;
  summary.episodes_required = curve.back().total_episodes;
  for (const CurveRow& row : curve) {
    if (row.mean_return >= threshold) {
      summary.episodes_required = row.total_episodes;
      break;
    }
  }
  return summary;
}

}  // namespace armrl
