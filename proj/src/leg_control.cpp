// Copyright 2026 The cpgloco Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cpgloco/leg_control.hpp"

#include <algorithm>
#include <cmath>

namespace cpgloco {
namespace {

// Planar two-link chain in the abduction-rotated sagittal plane.
struct Planar {
  double x;
  double z;
};

Planar planar_foot(double q_hip, double q_knee, double l1, double l2) {
  return {-l1 * std::sin(q_hip) - l2 * std::sin(q_hip + q_knee),
          -l1 * std::cos(q_hip) - l2 * std::cos(q_hip + q_knee)};
}

// Rotates a point (x, side * offset, z) of the sagittal plane about x by q_abd.
Vec3 abduct(double q_abd, double x, double lateral, double z) {
  const double c = std::cos(q_abd);
  const double s = std::sin(q_abd);
  return {x, c * lateral - s * z, s * lateral + c * z};
}

}  // namespace

void LegGeometry::validate() const {
  if (!(hip_offset >= 0.0) || !(l_thigh > 0.0) || !(l_calf > 0.0)) {
    throw RangeError("leg lengths must be positive");
  }
  if (side != 1 && side != -1) throw RangeError("leg side must be +1 or -1");
}

Vec3 forward_kinematics(const JointAngles& q, const LegGeometry& geom) {
  const Planar p = planar_foot(q[1], q[2], geom.l_thigh, geom.l_calf);
  return abduct(q[0], p.x, geom.side * geom.hip_offset, p.z);
}

Vec3 knee_position(const JointAngles& q, const LegGeometry& geom) {
  const Planar p = planar_foot(q[1], 0.0, geom.l_thigh, 0.0);
  return abduct(q[0], p.x, geom.side * geom.hip_offset, p.z);
}

Vec3 thigh_root(const JointAngles& q, const LegGeometry& geom) {
  return abduct(q[0], 0.0, geom.side * geom.hip_offset, 0.0);
}

IkSolution solve_ik(const Vec3& target, const LegGeometry& geom) {
  IkSolution sol;
  const double lateral = geom.side * geom.hip_offset;
  const double l1 = geom.l_thigh;
  const double l2 = geom.l_calf;

  // Abduction: the foot lies at distance hip_offset from the sagittal plane.
  const double rho2 = target.y * target.y + target.z * target.z;
  const double off2 = geom.hip_offset * geom.hip_offset;
  double sagittal_depth = 0.0;
  if (rho2 >= off2) {
    sagittal_depth = std::sqrt(rho2 - off2);
  } else {
    sol.reachable = false;
  }
  const double z_plane = -sagittal_depth;
  sol.q[0] = wrap_to_pi(std::atan2(target.z, target.y) - std::atan2(z_plane, lateral));

  double x = target.x;
  double z = z_plane;
  const double reach = std::hypot(x, z);
  const double max_reach = l1 + l2;
  const double min_reach = std::abs(l1 - l2);
  if (reach > max_reach) {
    sol.reachable = false;
    x *= max_reach / reach;
    z *= max_reach / reach;
  } else if (reach < min_reach) {
    sol.reachable = false;
    if (reach > 0.0) {
      x *= min_reach / reach;
      z *= min_reach / reach;
    } else {
      z = -min_reach;
    }
  }
  const double d2 = x * x + z * z;
  const double cos_knee = std::clamp((d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double knee = -std::acos(cos_knee);
  const double k1 = l1 + l2 * std::cos(knee);
  const double k2 = l2 * std::sin(knee);
  sol.q[1] = std::atan2(-x, -z) - std::atan2(k2, k1);
  sol.q[2] = knee;
  return sol;
}

JointAngles inverse_kinematics(const Vec3& target, const LegGeometry& geom) {
  const IkSolution sol = solve_ik(target, geom);
  if (!sol.reachable) {
    throw WorkspaceError("foot target outside the leg workspace", sol.q);
  }
  return sol.q;
}

double pd_torque(double q_d, double qdot_d, double q, double qdot, const PdGains& gains,
                 double tau_max) {
  const double tau = gains.kp * (q_d - q) + gains.kd * (qdot_d - qdot);
  return std::clamp(tau, -tau_max, tau_max);
}

JointVector pd_torque(const JointCommand& cmd, const JointVector& q, const JointVector& qdot,
                      const PdGains& gains, double tau_max) {
  JointVector tau{};
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    tau[k] = pd_torque(cmd.q_d[k], cmd.qdot_d[k], q[k], qdot[k], gains, tau_max);
  }
  return tau;
}

}  // namespace cpgloco
