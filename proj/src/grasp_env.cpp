#include "armrl/grasp_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace armrl {

void GraspConfig::validate() const {
  if (horizon <= 0) throw std::invalid_argument("GraspConfig: horizon must be positive");
  if (cyl_radius <= 0.0) throw std::invalid_argument("GraspConfig: cyl_radius must be positive");
  if (lift_height <= 0.0) throw std::invalid_argument("GraspConfig: lift_height must be positive");
  if (goal().norm() > arm.reach()) {
    throw std::invalid_argument("GraspConfig: goal lies outside the reachable workspace");
  }
  if (cyl_start.norm() > arm.reach()) {
    throw std::invalid_argument("GraspConfig: cylinder start lies outside the reachable workspace");
  }
}

double grasp_reward(const GraspDistances& d, const Eigen::Vector3d& weights,
                    double action_norm, double action_penalty) {
  const double weighted = weights[0] * d.d1 + weights[1] * d.d2 + weights[2] * d.d3;
  return 1.0 / (1.0 + weighted) - action_penalty * action_norm;
}

GraspEnv::GraspEnv(GraspConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  q = cfg_.q_init;
  aperture = cfg_.aperture_init;
  p_cyl = cfg_.cyl_start;
  goal = cfg_.goal();
}

Vec GraspEnv::action_low() const {
  Vec lo(3);
  lo << -cfg_.torque_limit, -cfg_.torque_limit, -1.0;
  return lo;
}

Vec GraspEnv::action_high() const {
  Vec hi(3);
  hi << cfg_.torque_limit, cfg_.torque_limit, 1.0;
  return hi;
}

std::pair<Vec2, Vec2> GraspEnv::fingertips() const {
  const Vec2 p_ee = forward_kinematics(q, cfg_.arm.link_lengths);
  const Vec2 dir = end_link_direction(q);
  const Vec2 normal(-dir.y(), dir.x());
  const double offset = cfg_.finger_base_offset + cfg_.finger_span * aperture;
  return {p_ee + offset * normal, p_ee - offset * normal};
}

GraspDistances GraspEnv::distances() const {
  const Vec2 p_ee = forward_kinematics(q, cfg_.arm.link_lengths);
  GraspDistances d;
  d.d1 = (p_ee - p_cyl).norm();
  const auto [f1, f2] = fingertips();
  // The radius acts as an offset; floored at zero since the kinematic model
  // has no contact to keep fingertips out of the cylinder.
  d.d2 = std::max(0.0, (p_cyl - f1).norm() - cfg_.cyl_radius) +
         std::max(0.0, (p_cyl - f2).norm() - cfg_.cyl_radius);
  d.d3 = (p_cyl - goal).norm();
  return d;
}

Vec GraspEnv::observation() const {
  const Vec2 p_ee = forward_kinematics(q, cfg_.arm.link_lengths);
  Vec obs(12);
  obs << q[0], q[1], aperture, qd[0], qd[1], aperture_vel, p_ee.x(), p_ee.y(),
      goal.x(), goal.y(), p_cyl.x(), p_cyl.y();
  return obs;
}

Vec GraspEnv::reset(Rng& rng) {
  q[0] = cfg_.q_init[0] + rng.uniform(-cfg_.init_pos_noise, cfg_.init_pos_noise);
  q[1] = cfg_.q_init[1] + rng.uniform(-cfg_.init_pos_noise, cfg_.init_pos_noise);
  qd[0] = rng.uniform(-cfg_.init_vel_noise, cfg_.init_vel_noise);
  qd[1] = rng.uniform(-cfg_.init_vel_noise, cfg_.init_vel_noise);
  aperture = cfg_.aperture_init;
  aperture_vel = 0.0;
  p_cyl = cfg_.cyl_start;
  cyl_fall_speed = 0.0;
  attached = false;
  goal = cfg_.goal();
  t = 0;
  return observation();
}

StepResult GraspEnv::step(const Vec& action) {
  if (action.size() != 3) {
    throw std::invalid_argument("GraspEnv::step: action must have 3 entries");
  }
  const Vec2 torque = Vec2(action[0], action[1])
                          .cwiseMax(-cfg_.torque_limit)
                          .cwiseMin(cfg_.torque_limit);
  const double grip_cmd = std::clamp(action[2], -1.0, 1.0);

  arm_step(cfg_.arm, q, qd, torque);

  const double prev_aperture = aperture;
  aperture = std::clamp(
      aperture + cfg_.arm.dt * cfg_.aperture_rate * grip_cmd, 0.0, 1.0);
  aperture_vel = (aperture - prev_aperture) / cfg_.arm.dt;

  const Vec2 p_ee = forward_kinematics(q, cfg_.arm.link_lengths);
  if (attached) {
    if (aperture >= cfg_.attach_aperture) {
      attached = false;
      cyl_fall_speed = 0.0;
    } else {
      p_cyl = p_ee;
    }
  }
  if (!attached) {
    const double grab_range = cfg_.cyl_radius + cfg_.attach_distance_slack;
    if (aperture < cfg_.attach_aperture && (p_ee - p_cyl).norm() < grab_range) {
      attached = true;
      p_cyl = p_ee;
      cyl_fall_speed = 0.0;
    } else if (p_cyl.y() > cfg_.cyl_start.y()) {
      // Free cylinder falls back to the table.
      cyl_fall_speed += cfg_.arm.gravity * cfg_.arm.dt;
      p_cyl.y() = std::max(cfg_.cyl_start.y(),
                           p_cyl.y() - cyl_fall_speed * cfg_.arm.dt);
      if (p_cyl.y() == cfg_.cyl_start.y()) cyl_fall_speed = 0.0;
    }
  }
  t += 1;

  StepResult result;
  result.obs = observation();
  const GraspDistances d = distances();
  Eigen::Vector3d executed;
  executed << torque[0], torque[1], grip_cmd;
  result.reward =
      grasp_reward(d, cfg_.distance_weights, executed.norm(), cfg_.action_penalty);
  result.info.distances[0] = d.d1;
  result.info.distances[1] = d.d2;
  result.info.distances[2] = d.d3;
  result.info.success = d.d3 < cfg_.success_radius;
  result.info.bad_terminal =
      d.d1 > cfg_.bad_terminal_radius || d.d3 > cfg_.bad_terminal_radius;
  result.terminal = result.info.bad_terminal || t >= cfg_.horizon;
  return result;
}

std::unique_ptr<Env> GraspEnv::clone() const {
  return std::make_unique<GraspEnv>(*this);
}

}  // namespace armrl
