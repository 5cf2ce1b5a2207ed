#include "armrl/reach_env.hpp"

#include <cmath>
#include <stdexcept>

namespace armrl {

void ReachConfig::validate() const {
  if (horizon <= 0) throw std::invalid_argument("ReachConfig: horizon must be positive");
  if (torque_limit <= 0.0) throw std::invalid_argument("ReachConfig: torque_limit must be positive");
  if (goal_half_width < 0.0) throw std::invalid_argument("ReachConfig: goal_half_width must be non-negative");
  // The goal box must intersect the reachable disk, otherwise reset can never
  // produce a goal.
  const double reach = arm.reach();
  const double nearest_x = std::max(0.0, std::abs(goal_center.x()) - goal_half_width);
  const double nearest_y = std::max(0.0, std::abs(goal_center.y()) - goal_half_width);
  if (std::hypot(nearest_x, nearest_y) > reach) {
    throw std::invalid_argument("ReachConfig: goal box lies outside the reachable workspace");
  }
}

double reach_reward(double goal_distance, double action_norm,
                    double action_penalty) {
  return -goal_distance - action_penalty * action_norm;
}

ReachEnv::ReachEnv(ReachConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  q = cfg_.q_init;
}

Vec ReachEnv::action_low() const {
  return Vec::Constant(2, -cfg_.torque_limit);
}

Vec ReachEnv::action_high() const {
  return Vec::Constant(2, cfg_.torque_limit);
}

Vec ReachEnv::observation() const {
  const Vec2 p_ee = forward_kinematics(q, cfg_.arm.link_lengths);
  Vec obs(8);
  obs << q[0], q[1], qd[0], qd[1], goal.x(), goal.y(), p_ee.x(), p_ee.y();
  return obs;
}

Vec ReachEnv::reset(Rng& rng) {
  q[0] = cfg_.q_init[0] + rng.uniform(-cfg_.init_pos_noise, cfg_.init_pos_noise);
  q[1] = cfg_.q_init[1] + rng.uniform(-cfg_.init_pos_noise, cfg_.init_pos_noise);
  qd[0] = rng.uniform(-cfg_.init_vel_noise, cfg_.init_vel_noise);
  qd[1] = rng.uniform(-cfg_.init_vel_noise, cfg_.init_vel_noise);
  const double reach = cfg_.arm.reach();
  int attempts = 0;
  do {
    if (++attempts > cfg_.goal_resample_limit) {
      throw std::runtime_error("ReachEnv::reset: no reachable goal found in the box");
    }
    goal.x() = cfg_.goal_center.x() + rng.uniform(-cfg_.goal_half_width, cfg_.goal_half_width);
    goal.y() = cfg_.goal_center.y() + rng.uniform(-cfg_.goal_half_width, cfg_.goal_half_width);
  } while (goal.norm() > reach);
  t = 0;
  return observation();
}

StepResult ReachEnv::step(const Vec& action) {
  if (action.size() != 2) {
    throw std::invalid_argument("ReachEnv::step: action must have 2 entries");
  }
  const Vec2 torque = Vec2(action[0], action[1])
                          .cwiseMax(-cfg_.torque_limit)
                          .cwiseMin(cfg_.torque_limit);
  arm_step(cfg_.arm, q, qd, torque);
  t += 1;

  StepResult result;
  result.obs = observation();
  const Vec2 p_ee(result.obs[6], result.obs[7]);
  const double distance = (goal - p_ee).norm();
  result.reward = reach_reward(distance, torque.norm(), cfg_.action_penalty);
  result.info.distances[0] = distance;
  result.info.success = distance < cfg_.success_radius;
  result.terminal = result.info.success || t >= cfg_.horizon;
  return result;
}

std::unique_ptr<Env> ReachEnv::clone() const {
  return std::make_unique<ReachEnv>(*this);
}

}  // namespace armrl
