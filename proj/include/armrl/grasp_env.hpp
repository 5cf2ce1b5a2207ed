#pragma once

#include "armrl/arm_dynamics.hpp"
#include "armrl/env.hpp"

namespace armrl {

// Toy grasp-and-lift on the planar arm with a one-DOF gripper aperture.
// Observation layout: [q (2), aperture, qdot (2), aperture rate, p_ee (2),
// p_goal (2), p_cyl (2)]. Action: [torque_1, torque_2, gripper command],
// gripper command in [-1, 1] driving the aperture rate.
//
// The reward 1 / (1 + sum_j c_j d_j) - c_a ||a|| is bounded by 1, reached when
// all three distances vanish and no torque is applied. Straying (d1 or d3
// beyond bad_terminal_radius) ends the episode as a bad terminal.
//
// Grasping is a kinematic attachment: the cylinder rigidly follows the end
// effector while the aperture is below attach_aperture and it was picked up
// within attach_distance_slack; it falls back to the table when released.
struct GraspConfig {
  ArmParams arm;
  double torque_limit = 5.0;
  double cyl_radius = 0.02;            // m
  Vec2 cyl_start{0.45, 0.05};          // m
  double lift_height = 0.3;            // m, goal = cyl_start + (0, lift)
  int horizon = 500;
  Eigen::Vector3d distance_weights{1.0, 1.0, 1.0};  // c_1..c_3
  double action_penalty = 1e-3;        // c_a
  double bad_terminal_radius = 0.35;   // m, for d1 and d3
  double success_radius = 0.05;        // m, d3 threshold, reported in info only
  double aperture_rate = 4.0;          // full travel per 0.25 s
  double attach_aperture = 0.3;
  double attach_distance_slack = 0.02;  // m
  double finger_base_offset = 0.01;    // m, fingertip offset when closed
  double finger_span = 0.06;           // m, extra offset when fully open
  Vec2 q_init{-0.51, 1.55};
  double aperture_init = 1.0;          // open
  double init_pos_noise = 0.02;
  double init_vel_noise = 0.1;

  Vec2 goal() const { return cyl_start + Vec2(0.0, lift_height); }
  void validate() const;
};

struct GraspDistances {
  double d1 = 0.0;  // end effector to cylinder
  double d2 = 0.0;  // fingers to cylinder center, radius-offset, floored at 0
  double d3 = 0.0;  // cylinder to goal
};

double grasp_reward(const GraspDistances& d, const Eigen::Vector3d& weights,
                    double action_norm, double action_penalty);

class GraspEnv final : public Env {
 public:
  explicit GraspEnv(GraspConfig cfg);

  int obs_dim() const override { return 12; }
  int action_dim() const override { return 3; }
  Vec action_low() const override;
  Vec action_high() const override;
  int horizon() const override { return cfg_.horizon; }

  Vec reset(Rng& rng) override;
  StepResult step(const Vec& action) override;
  std::unique_ptr<Env> clone() const override;

  const GraspConfig& config() const { return cfg_; }

  // Fingertip positions for the current arm state and aperture.
  std::pair<Vec2, Vec2> fingertips() const;
  GraspDistances distances() const;

  // Internal state, exposed for tests.
  Vec2 q = Vec2::Zero();
  Vec2 qd = Vec2::Zero();
  double aperture = 1.0;
  double aperture_vel = 0.0;
  Vec2 p_cyl = Vec2::Zero();
  double cyl_fall_speed = 0.0;
  bool attached = false;
  Vec2 goal = Vec2::Zero();
  int t = 0;

  Vec observation() const;

 private:
  GraspConfig cfg_;
};

}  // namespace armrl
