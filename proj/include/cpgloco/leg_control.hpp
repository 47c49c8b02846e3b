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

// Three-joint leg kinematics (hip abduction about x, hip pitch and knee about y)
// and joint PD control.
//
// Hip frame: origin at the abduction joint, x forward, y left, z up. At zero
// angles the foot sits at (0, side * hip_offset, -(l_thigh + l_calf)). Positive
// hip pitch swings the foot backward; the knee bends backward (q_knee <= 0).

#pragma once

#include <array>

#include "cpgloco/common.hpp"

namespace cpgloco {

struct LegGeometry {
  double hip_offset = 0.08;
  double l_thigh = 0.213;
  double l_calf = 0.213;
  int side = 1;  // +1 left, -1 right

  void validate() const;
};

// hip abduction, hip pitch, knee
using JointAngles = std::array<double, kJointsPerLeg>;

struct JointCommand {
  JointVector q_d{};
  JointVector qdot_d{};
};

struct PdGains {
  double kp = 100.0;
  double kd = 2.0;
};

inline constexpr double kDefaultTauMax = 23.7;

class WorkspaceError : public Error {
 public:
  WorkspaceError(const std::string& what, const JointAngles& clamped)
      : Error(ErrorCode::kWorkspace, what), clamped_(clamped) {}
  // Joint angles reaching the nearest point of the workspace.
  const JointAngles& clamped() const noexcept { return clamped_; }

 private:
  JointAngles clamped_;
};

struct IkSolution {
  JointAngles q{};
  bool reachable = true;
};

// Never throws; unreachable targets are projected onto the workspace boundary.
IkSolution solve_ik(const Vec3& target, const LegGeometry& geom);

// Throws WorkspaceError (carrying the clamped solution) on unreachable targets.
JointAngles inverse_kinematics(const Vec3& target, const LegGeometry& geom);

Vec3 forward_kinematics(const JointAngles& q, const LegGeometry& geom);

// Knee position in the hip frame (end of the thigh link).
Vec3 knee_position(const JointAngles& q, const LegGeometry& geom);

// Upper end of the thigh link, after the abduction offset.
Vec3 thigh_root(const JointAngles& q, const LegGeometry& geom);

// tau = kp (q_d - q) + kd (qdot_d - qdot), clamped to +-tau_max.
double pd_torque(double q_d, double qdot_d, double q, double qdot, const PdGains& gains,
                 double tau_max);
JointVector pd_torque(const JointCommand& cmd, const JointVector& q, const JointVector& qdot,
                      const PdGains& gains, double tau_max = kDefaultTauMax);

}  // namespace cpgloco
