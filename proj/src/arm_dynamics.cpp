#include "armrl/arm_dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace armrl {

Vec2 forward_kinematics(const Vec2& q, const Vec2& link_lengths) {
  double angle = 0.0;
  Vec2 p = Vec2::Zero();
  for (int i = 0; i < 2; ++i) {
    angle += q[i];
    p.x() += link_lengths[i] * std::cos(angle);
    p.y() += link_lengths[i] * std::sin(angle);
  }
  return p;
}

Vec2 end_link_direction(const Vec2& q) {
  const double angle = q[0] + q[1];
  return Vec2(std::cos(angle), std::sin(angle));
}

namespace {

Eigen::Matrix2d mass_matrix(const ArmParams& p, const Vec2& q) {
  const double l1 = p.link_lengths[0], l2 = p.link_lengths[1];
  const double m1 = p.link_masses[0], m2 = p.link_masses[1];
  const double lc1 = 0.5 * l1, lc2 = 0.5 * l2;
  const double i1 = m1 * l1 * l1 / 12.0, i2 = m2 * l2 * l2 / 12.0;
  const double c2 = std::cos(q[1]);

  Eigen::Matrix2d m;
  m(0, 0) = m1 * lc1 * lc1 + i1 +
            m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2) + i2;
  m(0, 1) = m2 * (lc2 * lc2 + l1 * lc2 * c2) + i2;
  m(1, 0) = m(0, 1);
  m(1, 1) = m2 * lc2 * lc2 + i2;
  return m;
}

}  // namespace

Vec2 arm_acceleration(const ArmParams& p, const Vec2& q, const Vec2& qd,
                      const Vec2& torque) {
  const double l1 = p.link_lengths[0], l2 = p.link_lengths[1];
  const double m1 = p.link_masses[0], m2 = p.link_masses[1];
  const double lc1 = 0.5 * l1, lc2 = 0.5 * l2;
  const double s2 = std::sin(q[1]);
  const double h = m2 * l1 * lc2 * s2;

  // Coriolis/centrifugal torques C(q, qd) qd.
  Vec2 coriolis;
  coriolis[0] = -h * qd[1] * qd[0] - h * (qd[0] + qd[1]) * qd[1];
  coriolis[1] = h * qd[0] * qd[0];

  Vec2 grav;
  grav[0] = (m1 * lc1 + m2 * l1) * p.gravity * std::cos(q[0]) +
            m2 * lc2 * p.gravity * std::cos(q[0] + q[1]);
  grav[1] = m2 * lc2 * p.gravity * std::cos(q[0] + q[1]);

  const Vec2 rhs = torque - coriolis - grav - p.joint_damping * qd;
  return mass_matrix(p, q).ldlt().solve(rhs);
}

void arm_step(const ArmParams& p, Vec2& q, Vec2& qd, const Vec2& torque) {
  const double h = p.dt / static_cast<double>(p.substeps);
  for (int s = 0; s < p.substeps; ++s) {
    const Vec2 qdd = arm_acceleration(p, q, qd, torque);
    qd += h * qdd;
    q += h * qd;
  }
  if (!q.allFinite() || !qd.allFinite()) {
    throw std::runtime_error("arm_step: state diverged (non-finite q or qd)");
  }
}

double kinetic_energy(const ArmParams& p, const Vec2& q, const Vec2& qd) {
  return 0.5 * qd.dot(mass_matrix(p, q) * qd);
}

}  // namespace armrl
