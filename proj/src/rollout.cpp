#include "armrl/rollout.hpp"

#include <fstream>
#include <stdexcept>

#include "armrl/csv.hpp"
#include "armrl/parallel.hpp"

namespace armrl {

Trajectory collect_trajectory(Env& env, const GaussianMlpPolicy& policy,
                              Rng& env_rng, Rng& action_rng) {
  Trajectory traj;
  Vec obs = env.reset(env_rng);
  for (int t = 0; t < env.horizon(); ++t) {
    const GaussianMlpPolicy::Sample sample = policy.sample_action(obs, action_rng);
    const StepResult r = env.step(sample.clamped);

    Transition tr;
    tr.s = obs;
    tr.a_raw = sample.raw;
    tr.a_env = sample.clamped;
    tr.r = r.reward;
    tr.s_next = r.obs;
    // True task terminals (success / bad terminal) bootstrap with zero;
    // horizon truncation leaves terminal unset so GAE bootstraps V(s_T).
    tr.terminal = r.info.success || r.info.bad_terminal;
    tr.t = t;
    tr.info = r.info;
    traj.push(std::move(tr));

    if (r.terminal) break;
    obs = r.obs;
  }
  return traj;
}

std::vector<Trajectory> collect_episodes(const Env& env,
                                         const GaussianMlpPolicy& policy,
                                         int n_episodes,
                                         std::uint64_t master_seed,
                                         std::int64_t episode_base) {
  std::vector<Trajectory> trajs(n_episodes);
  par::parallel_for(static_cast<std::size_t>(n_episodes), [&](std::size_t i) {
    const std::uint64_t index =
        static_cast<std::uint64_t>(episode_base + static_cast<std::int64_t>(i));
    const std::unique_ptr<Env> episode_env = env.clone();
    Rng env_rng = substream(master_seed, "env", index);
    Rng action_rng = substream(master_seed, "exploration", index);
    trajs[i] = collect_trajectory(*episode_env, policy, env_rng, action_rng);
  });
  return trajs;
}

FlatBatch flatten(const std::vector<Trajectory>& trajs) {
  FlatBatch batch;
  batch.episodes = static_cast<std::int64_t>(trajs.size());
  for (const Trajectory& traj : trajs) batch.timesteps += traj.length();
  batch.states.reserve(batch.timesteps);
  batch.actions_raw.reserve(batch.timesteps);
  batch.rewards.reserve(batch.timesteps);
  for (const Trajectory& traj : trajs) {
    for (const Transition& tr : traj.transitions) {
      batch.states.push_back(tr.s);
      batch.actions_raw.push_back(tr.a_raw);
      batch.rewards.push_back(tr.r);
    }
  }
  return batch;
}

std::vector<double> flatten_weights(const std::vector<std::vector<double>>& per_traj) {
  std::vector<double> flat;
  for (const auto& row : per_traj) flat.insert(flat.end(), row.begin(), row.end());
  return flat;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  const int state_dim = traj.transitions.empty() ? 0 : static_cast<int>(traj.transitions[0].s.size());
  const int action_dim = traj.transitions.empty() ? 0 : static_cast<int>(traj.transitions[0].a_env.size());
  out << "t";
  for (int i = 0; i < state_dim; ++i) out << ",s" << i;
  for (int i = 0; i < action_dim; ++i) out << ",a" << i;
  out << ",reward,terminal\n";
  for (const Transition& tr : traj.transitions) {
    out << tr.t;
    for (int i = 0; i < state_dim; ++i) out << ',' << csv::format(tr.s[i]);
    for (int i = 0; i < action_dim; ++i) out << ',' << csv::format(tr.a_env[i]);
    out << ',' << csv::format(tr.r) << ',' << (tr.terminal ? 1 : 0) << '\n';
  }
}

}  // namespace armrl
