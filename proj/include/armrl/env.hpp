#pragma once

#include <memory>

#include "armrl/mlp.hpp"
#include "armrl/rng.hpp"

namespace armrl {

// Extra per-step facts surfaced alongside the reward. Success and bad-terminal
// are distinguishable so evaluation can count them separately.
struct StepInfo {
  bool success = false;
  bool bad_terminal = false;
  // Task distances; reach fills [0] (end effector to goal), grasp fills all
  // three (d1, d2, d3).
  double distances[3] = {0.0, 0.0, 0.0};
};

struct StepResult {
  Vec obs;
  double reward = 0.0;
  bool terminal = false;
  StepInfo info;
};

// Episodic continuous-control environment. Instances are single-owner;
// parallel rollout collection clones one instance per episode.
class Env {
 public:
  virtual ~Env() = default;

  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual Vec action_low() const = 0;
  virtual Vec action_high() const = 0;
  virtual int horizon() const = 0;

  virtual Vec reset(Rng& rng) = 0;
  virtual StepResult step(const Vec& action) = 0;

  virtual std::unique_ptr<Env> clone() const = 0;
};

}  // namespace armrl
