#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "armrl/env.hpp"
#include "armrl/estimation.hpp"
#include "armrl/gaussian_policy.hpp"

namespace armrl {

// One full episode under the stochastic policy. env_rng drives resets,
// action_rng drives the policy noise.
Trajectory collect_trajectory(Env& env, const GaussianMlpPolicy& policy,
                              Rng& env_rng, Rng& action_rng);

// n_episodes episodes in parallel, one cloned environment each. Episode i
// uses substreams ("env", episode_base + i) and ("exploration",
// episode_base + i) of master_seed, and results are stored in episode order,
// so the batch is independent of scheduling and thread count.
std::vector<Trajectory> collect_episodes(const Env& env,
                                         const GaussianMlpPolicy& policy,
                                         int n_episodes,
                                         std::uint64_t master_seed,
                                         std::int64_t episode_base);

// Flattened per-timestep views over a trajectory batch.
struct FlatBatch {
  std::vector<Vec> states;
  std::vector<Vec> actions_raw;
  std::vector<double> rewards;
  std::int64_t timesteps = 0;
  std::int64_t episodes = 0;
};
FlatBatch flatten(const std::vector<Trajectory>& trajs);

std::vector<double> flatten_weights(const std::vector<std::vector<double>>& per_traj);

// Per-step episode trace (t, state, executed action, reward, terminal) for
// offline plotting.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace armrl
