#pragma once

#include <Eigen/Dense>

#include "armrl/mlp.hpp"

namespace armrl {

using Vec2 = Eigen::Vector2d;

// Physical model of the 2-link planar arm. Uniform-rod links (center of mass
// at the midpoint, inertia m l^2 / 12) in a vertical plane, torque driven,
// integrated with semi-implicit Euler.
struct ArmParams {
  Vec2 link_lengths{0.4, 0.4};   // m
  Vec2 link_masses{0.5, 0.5};    // kg
  double gravity = 9.81;         // m/s^2, pulls along -y
  double joint_damping = 0.1;    // N*m*s viscous
  double dt = 0.01;              // s, control timestep
  int substeps = 1;              // integrator substeps per control step

  double reach() const { return link_lengths.sum(); }
};

// End-effector position of a planar chain: cumulative-angle link sums.
Vec2 forward_kinematics(const Vec2& q, const Vec2& link_lengths);

// Direction of the last link (unit vector), for fingertip placement.
Vec2 end_link_direction(const Vec2& q);

// Joint accelerations from the manipulator equation
// M(q) qdd + C(q, qd) qd + g(q) + b qd = tau.
Vec2 arm_acceleration(const ArmParams& params, const Vec2& q, const Vec2& qd,
                      const Vec2& torque);

// One control step of dt seconds (substeps semi-implicit Euler updates).
// Throws if the state leaves the finite range (integration blowup).
void arm_step(const ArmParams& params, Vec2& q, Vec2& qd, const Vec2& torque);

double kinetic_energy(const ArmParams& params, const Vec2& q, const Vec2& qd);

}  // namespace armrl
