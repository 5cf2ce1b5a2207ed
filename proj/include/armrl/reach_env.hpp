#pragma once

#include "armrl/arm_dynamics.hpp"
#include "armrl/env.hpp"

namespace armrl {

// Random-target reaching on the planar arm. Observation layout:
// [q (2), qdot (2), p_goal (2), p_ee (2)]. Reward is the negative distance to
// the goal minus a small action penalty, so the best collectible return is 0.
// An episode is terminal on success (distance < success_radius) or at the
// horizon.
struct ReachConfig {
  ArmParams arm;
  double torque_limit = 5.0;      // N*m, symmetric bounds
  Vec2 goal_center{0.4, 0.3};     // m, box center in the workspace
  double goal_half_width = 0.2;   // m, uniform box half-width per axis
  int horizon = 300;
  double action_penalty = 1e-3;   // c_a
  double success_radius = 0.05;   // m
  Vec2 q_init{0.785398163397448, 0.785398163397448};  // rad
  double init_pos_noise = 0.02;   // rad, uniform half-width
  double init_vel_noise = 0.1;    // rad/s, uniform half-width
  int goal_resample_limit = 1000;

  // Throws unless the goal box intersects the reachable workspace.
  void validate() const;
};

double reach_reward(double goal_distance, double action_norm,
                    double action_penalty);

class ReachEnv final : public Env {
 public:
  explicit ReachEnv(ReachConfig cfg);

  int obs_dim() const override { return 8; }
  int action_dim() const override { return 2; }
  Vec action_low() const override;
  Vec action_high() const override;
  int horizon() const override { return cfg_.horizon; }

  Vec reset(Rng& rng) override;
  StepResult step(const Vec& action) override;
  std::unique_ptr<Env> clone() const override;

  const ReachConfig& config() const { return cfg_; }

  // Internal state, exposed for tests that need to construct exact scenarios.
  Vec2 q = Vec2::Zero();
  Vec2 qd = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
  int t = 0;

  Vec observation() const;  // p_ee recomputed from q, never stale

 private:
  ReachConfig cfg_;
};

}  // namespace armrl
