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

// Kinematic quadruped model closing the CPG -> foot target -> IK -> PD loop.
//
// The base is not simulated as a rigid body under contact forces. Stance feet
// that touch the terrain are pinned: the planar base twist (vx, vy, wz) is the
// regularized least-squares rigid motion that cancels their commanded motion in
// the body frame, and base height, roll and pitch are fitted so that the stance
// feet rest on the terrain. Joints follow the PD torque through a per-joint
// effective inertia. With no pinned foot the planar twist is held.

#pragma once

#include <array>
#include <random>
#include <span>

#include "cpgloco/cpg.hpp"
#include "cpgloco/gait_map.hpp"
#include "cpgloco/leg_control.hpp"
#include "cpgloco/metrics.hpp"
#include "cpgloco/terrain.hpp"

namespace cpgloco {

struct RobotState {
  Vec3 position;  // world, m
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  Vec3 lin_vel;  // body frame, m/s
  Vec3 ang_vel;  // body frame, rad/s
  JointVector q{};
  JointVector qdot{};
  std::array<bool, kNumLegs> contacts{};
  double energy = 0.0;  // J, integral of mechanical power
  double power = 0.0;   // W, most recent substep
  // Decaying world-frame velocity left by pushes.
  double push_vx = 0.0;
  double push_vy = 0.0;

  bool finite() const;
};

struct BodyGeometry {
  std::array<Vec3, kNumLegs> hip_positions = {{{0.1881, 0.04675, 0.0},
                                               {0.1881, -0.04675, 0.0},
                                               {-0.1881, 0.04675, 0.0},
                                               {-0.1881, -0.04675, 0.0}}};
  Vec3 base_half_extents{0.19, 0.1, 0.05};
  double thigh_radius = 0.025;
};

struct DynamicsParams {
  double mass_scale = 1.0;
  double added_mass = 0.0;  // kg
  double friction = 1.0;
  PdGains gains;
};

struct SimParams {
  CpgNetworkConfig cpg = trot_config(1.0);
  GaitShapeParams gait;
  std::array<LegGeometry, kNumLegs> legs = default_legs();
  BodyGeometry body;
  DynamicsParams dynamics;
  double tau_max = kDefaultTauMax;
  double joint_inertia = 0.05;  // kg m^2 at mass_scale 1
  double nominal_mass = 12.0;   // kg
  double contact_tolerance = 0.01;
  // A stance foot slips when its commanded horizontal speed exceeds
  // friction * slip_speed_per_friction.
  double slip_speed_per_friction = 2.0;
  double push_decay_time = 0.25;  // s
  // Highest terrain rise a stance foot can step onto.
  double max_step_height = 0.12;
  PowerMode power_mode = PowerMode::kPerJointAbs;

  double total_mass() const { return nominal_mass * dynamics.mass_scale + dynamics.added_mass; }
  void validate() const;
  static std::array<LegGeometry, kNumLegs> default_legs();
};

struct FootMotion {
  Vec3 position;  // body frame
  Vec3 velocity;  // body frame
};

struct PlanarTwist {
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
};

// Least-squares (vx, vy, wz) with v + w x p_i = -u_i for every foot. A small
// ridge on wz keeps single-foot support well posed.
PlanarTwist solve_planar_twist(std::span<const FootMotion> feet);

struct SupportPoint {
  double x = 0.0;  // body frame
  double y = 0.0;
  double target = 0.0;  // terrain height minus body-frame foot z
};

struct SupportPose {
  double z = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
};

// Least-squares z + roll * y - pitch * x = target with a small ridge on the angles.
SupportPose fit_support_pose(std::span<const SupportPoint> points);

// Body-frame foot positions for the given leg-frame targets.
std::array<Vec3, kNumLegs> body_foot_positions(const FootTargets& targets,
                                               const SimParams& params);

enum class Termination { kRunning = 0, kCollision = 1, kTimeout = 2 };

const char* termination_name(Termination t);

struct SubstepOutcome {
  JointVector torque{};
  double power = 0.0;
  std::array<bool, kNumLegs> pinned{};
  bool collision = false;
};

// One 1 kHz substep. Throws StateCorruptionError on non-finite inputs.
SubstepOutcome simulate_step_1khz(RobotState& robot, CpgState& cpg,
                                  const ModulationCommand& cmd, const Heightmap& map,
                                  const SimParams& params);

// Places the robot at `spawn` with joints at the IK solution of the current CPG
// targets and base height fitted to the stance feet.
RobotState initial_robot_state(const CpgState& cpg, const Pose2& spawn, const Heightmap& map,
                               const SimParams& params);

bool in_collision(const RobotState& robot, const Heightmap& map, const SimParams& params);

// Collision takes precedence over timeout.
Termination check_termination(const RobotState& robot, const Heightmap& map,
                              const SimParams& params, double time, double episode_length);

struct EpisodeConfig {
  Range cmd_vx{-0.6, 0.6};
  Range cmd_vy{-0.4, 0.4};
  Range cmd_wz{-0.8, 0.8};
  double command_resample_period = 5.0;
  double episode_length = 20.0;

  bool push_enabled = false;
  double push_magnitude = 0.5;
  double push_period = 15.0;

  bool randomize_dynamics = false;
  Range mass_scale{0.7, 1.3};
  Range added_mass{0.0, 5.0};
  Range friction{0.3, 1.0};
  Range kp{55.0, 100.0};
  Range kd{0.7, 2.5};

  bool randomize_gait = false;
  Range h_range{0.25, 0.32};
  Range gc_range{0.03, 0.08};
  Range gp_range{0.0, 0.02};

  double extero_noise_std = 0.1;

  void validate() const;
};

VelocityCommand resample_commands(std::mt19937_64& rng, const EpisodeConfig& cfg);

// Adds a planar velocity of norm U[0, magnitude] * min(1, mass_ratio) in a
// uniformly random direction. mass_ratio = nominal / actual mass.
RobotState apply_push(const RobotState& robot, std::mt19937_64& rng, double magnitude,
                      double mass_ratio = 1.0);

// Draws from the configured ranges; nominal parameters (12 kg, friction 1,
// kp 100, kd 2) when randomization is disabled.
DynamicsParams randomize_dynamics(std::mt19937_64& rng, const EpisodeConfig& cfg);

GaitShapeParams randomize_gait(std::mt19937_64& rng, const EpisodeConfig& cfg,
                               const GaitShapeParams& nominal);

}  // namespace cpgloco
