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

#include "cpgloco/sim_env.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace cpgloco {
namespace {

constexpr double kAngleRidge = 1e-8;

struct Rotation2 {
  double c;
  double s;
  explicit Rotation2(double yaw) : c(std::cos(yaw)), s(std::sin(yaw)) {}
  // body -> world
  std::pair<double, double> apply(double x, double y) const { return {c * x - s * y, s * x + c * y}; }
  // world -> body
  std::pair<double, double> inverse(double x, double y) const { return {c * x + s * y, -s * x + c * y}; }
};

Vec3 hip_frame_target(const Vec3& leg_target, const LegGeometry& geom) {
  return {leg_target.x, leg_target.y + geom.side * geom.hip_offset, leg_target.z};
}

double foot_world_z(const RobotState& r, const Vec3& p) {
  return r.position.z + p.z + r.roll * p.y - r.pitch * p.x;
}

std::pair<double, double> world_xy(const RobotState& r, const Rotation2& rot, double bx,
                                   double by) {
  const auto [wx, wy] = rot.apply(bx, by);
  return {r.position.x + wx, r.position.y + wy};
}

// Stance feet whose terrain rises more than max_step above the foot cannot step
// up there; they are reported as blocked and left out of the fit.
std::array<bool, kNumLegs> fit_vertical(RobotState& robot, const std::array<Vec3, kNumLegs>& feet,
                                        const std::array<bool, kNumLegs>& stance,
                                        const Heightmap& map, const Rotation2& rot,
                                        double max_step) {
  std::array<bool, kNumLegs> blocked{};
  std::array<SupportPoint, kNumLegs> pts;
  std::size_t n = 0;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    if (!stance[i]) continue;
    const auto [wx, wy] = world_xy(robot, rot, feet[i].x, feet[i].y);
    const double ground = map.height_at(wx, wy);
    if (ground - foot_world_z(robot, feet[i]) > max_step) {
      blocked[i] = true;
      continue;
    }
    pts[n++] = {feet[i].x, feet[i].y, ground - feet[i].z};
  }
  if (n == 0) return blocked;
  const SupportPose pose = fit_support_pose(std::span<const SupportPoint>(pts.data(), n));
  robot.position.z = pose.z;
  robot.roll = pose.roll;
  robot.pitch = pose.pitch;
  return blocked;
}

void update_contacts(RobotState& robot, const std::array<Vec3, kNumLegs>& feet,
                     const Heightmap& map, const Rotation2& rot, double tolerance) {
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const auto [wx, wy] = world_xy(robot, rot, feet[i].x, feet[i].y);
    robot.contacts[i] = foot_world_z(robot, feet[i]) <= map.height_at(wx, wy) + tolerance;
  }
}

double sample(std::mt19937_64& rng, const Range& r) {
  if (!(r.hi > r.lo)) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

}  // namespace

bool RobotState::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  if (!ok(position.x) || !ok(position.y) || !ok(position.z) || !ok(roll) || !ok(pitch) ||
      !ok(yaw) || !ok(lin_vel.x) || !ok(lin_vel.y) || !ok(lin_vel.z) || !ok(ang_vel.x) ||
      !ok(ang_vel.y) || !ok(ang_vel.z) || !ok(energy) || !ok(push_vx) || !ok(push_vy)) {
    return false;
  }
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    if (!ok(q[k]) || !ok(qdot[k])) return false;
  }
  return true;
}

std::array<LegGeometry, kNumLegs> SimParams::default_legs() {
  std::array<LegGeometry, kNumLegs> legs;
  for (std::size_t i = 0; i < kNumLegs; ++i) legs[i].side = lateral_sign(i);
  return legs;
}

void SimParams::validate() const {
  cpg.validate();
  gait.validate();
  for (const auto& l : legs) l.validate();
  if (!(tau_max > 0.0)) throw RangeError("tau_max must be positive");
  if (!(joint_inertia > 0.0)) throw RangeError("joint inertia must be positive");
  if (!(nominal_mass > 0.0)) throw RangeError("mass must be positive");
  if (!(dynamics.gains.kp > 0.0) || !(dynamics.gains.kd >= 0.0)) {
    throw RangeError("need kp > 0 and kd >= 0");
  }
  if (!(dynamics.mass_scale > 0.0) || !(dynamics.friction > 0.0)) {
    throw RangeError("mass scale and friction must be positive");
  }
}

PlanarTwist solve_planar_twist(std::span<const FootMotion> feet) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (const FootMotion& f : feet) {
    const Eigen::Vector3d rx(1.0, 0.0, -f.position.y);
    const Eigen::Vector3d ry(0.0, 1.0, f.position.x);
    ata += rx * rx.transpose() + ry * ry.transpose();
    atb += rx * (-f.velocity.x) + ry * (-f.velocity.y);
  }
  if (feet.empty()) return {};
  ata(2, 2) += kAngleRidge;
  const Eigen::Vector3d sol = ata.ldlt().solve(atb);
  return {sol(0), sol(1), sol(2)};
}

SupportPose fit_support_pose(std::span<const SupportPoint> points) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (const SupportPoint& p : points) {
    const Eigen::Vector3d row(1.0, p.y, -p.x);
    ata += row * row.transpose();
    atb += row * p.target;
  }
  if (points.empty()) return {};
  ata(1, 1) += kAngleRidge;
  ata(2, 2) += kAngleRidge;
  const Eigen::Vector3d sol = ata.ldlt().solve(atb);
  return {sol(0), sol(1), sol(2)};
}

std::array<Vec3, kNumLegs> body_foot_positions(const FootTargets& targets,
                                               const SimParams& params) {
  std::array<Vec3, kNumLegs> out;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    out[i] = params.body.hip_positions[i] + hip_frame_target(targets[i], params.legs[i]);
  }
  return out;
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::kRunning:
      return "running";
    case Termination::kCollision:
      return "collision";
    case Termination::kTimeout:
      return "timeout";
  }
  return "unknown";
}

SubstepOutcome simulate_step_1khz(RobotState& robot, CpgState& cpg,
                                  const ModulationCommand& cmd, const Heightmap& map,
                                  const SimParams& params) {
  if (!robot.finite()) throw StateCorruptionError("non-finite robot state");
  const double dt = params.cpg.dt;
  SubstepOutcome out;

  const auto feet_before = body_foot_positions(foot_targets(cpg, params.gait), params);
  cpg = step(cpg, cmd, params.cpg);
  const FootTargets targets = foot_targets(cpg, params.gait);
  const auto feet = body_foot_positions(targets, params);

  // Joint tracking.
  JointCommand joint_cmd;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const IkSolution ik = solve_ik(hip_frame_target(targets[i], params.legs[i]), params.legs[i]);
    for (std::size_t j = 0; j < kJointsPerLeg; ++j) joint_cmd.q_d[i * kJointsPerLeg + j] = ik.q[j];
  }
  out.torque = pd_torque(joint_cmd, robot.q, robot.qdot, params.dynamics.gains, params.tau_max);
  const double inertia = params.joint_inertia * params.dynamics.mass_scale;
  for (std::size_t k = 0; k < kNumJoints; ++k) {
    robot.qdot[k] += dt * out.torque[k] / inertia;
    robot.q[k] += dt * robot.qdot[k];
  }
  out.power = mechanical_power(out.torque, robot.qdot, params.power_mode);
  robot.power = out.power;
  robot.energy += out.power * dt;

  // Vertical support from stance-phase feet.
  const Rotation2 rot(robot.yaw);
  std::array<bool, kNumLegs> stance{};
  for (std::size_t i = 0; i < kNumLegs; ++i) stance[i] = !swing_flag(cpg.legs[i].theta);
  const double z0 = robot.position.z;
  const double roll0 = robot.roll;
  const double pitch0 = robot.pitch;
  const auto blocked = fit_vertical(robot, feet, stance, map, rot, params.max_step_height);
  robot.lin_vel.z = (robot.position.z - z0) / dt;
  robot.ang_vel.x = (robot.roll - roll0) / dt;
  robot.ang_vel.y = (robot.pitch - pitch0) / dt;
  update_contacts(robot, feet, map, rot, params.contact_tolerance);

  // Planar twist from pinned feet.
  std::array<FootMotion, kNumLegs> pinned;
  std::size_t n = 0;
  const double slip_speed = params.dynamics.friction * params.slip_speed_per_friction;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const Vec3 v = (1.0 / dt) * (feet[i] - feet_before[i]);
    const bool slipping = std::hypot(v.x, v.y) > slip_speed;
    out.pinned[i] = stance[i] && robot.contacts[i] && !slipping && !blocked[i];
    if (out.pinned[i]) pinned[n++] = {feet[i], v};
  }
  const auto [push_bx, push_by] = rot.inverse(robot.push_vx, robot.push_vy);
  PlanarTwist twist{robot.lin_vel.x - push_bx, robot.lin_vel.y - push_by, robot.ang_vel.z};
  if (n > 0) twist = solve_planar_twist(std::span<const FootMotion>(pinned.data(), n));

  const double decay = std::exp(-dt / params.push_decay_time);
  robot.push_vx *= decay;
  robot.push_vy *= decay;
  const auto [push_bx1, push_by1] = rot.inverse(robot.push_vx, robot.push_vy);
  robot.lin_vel.x = twist.vx + push_bx1;
  robot.lin_vel.y = twist.vy + push_by1;
  robot.ang_vel.z = twist.wz;

  const auto [dx, dy] = rot.apply(robot.lin_vel.x, robot.lin_vel.y);
  robot.position.x += dt * dx;
  robot.position.y += dt * dy;
  robot.yaw = wrap_to_pi(robot.yaw + dt * robot.ang_vel.z);
  robot.roll = wrap_to_pi(robot.roll);
  robot.pitch = wrap_to_pi(robot.pitch);

  out.collision = in_collision(robot, map, params);
  return out;
}

RobotState initial_robot_state(const CpgState& cpg, const Pose2& spawn, const Heightmap& map,
                               const SimParams& params) {
  RobotState r;
  r.position = {spawn.x, spawn.y, params.gait.h + map.height_at(spawn.x, spawn.y)};
  r.yaw = wrap_to_pi(spawn.yaw);
  const FootTargets targets = foot_targets(cpg, params.gait);
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const IkSolution ik = solve_ik(hip_frame_target(targets[i], params.legs[i]), params.legs[i]);
    for (std::size_t j = 0; j < kJointsPerLeg; ++j) r.q[i * kJointsPerLeg + j] = ik.q[j];
  }
  const auto feet = body_foot_positions(targets, params);
  const Rotation2 rot(r.yaw);
  std::array<bool, kNumLegs> stance{};
  for (std::size_t i = 0; i < kNumLegs; ++i) stance[i] = !swing_flag(cpg.legs[i].theta);
  fit_vertical(r, feet, stance, map, rot, params.max_step_height);
  update_contacts(r, feet, map, rot, params.contact_tolerance);
  return r;
}

bool in_collision(const RobotState& robot, const Heightmap& map, const SimParams& params) {
  const Rotation2 rot(robot.yaw);
  const Vec3& half = params.body.base_half_extents;

  // Base box: terrain higher than its bottom anywhere under the footprint.
  const double step = map.resolution();
  const int nx = static_cast<int>(std::ceil(2.0 * half.x / step)) + 1;
  const int ny = static_cast<int>(std::ceil(2.0 * half.y / step)) + 1;
  const double bottom = robot.position.z - half.z;
  for (int a = 0; a < nx; ++a) {
    const double bx = -half.x + 2.0 * half.x * a / (nx - 1);
    for (int b = 0; b < ny; ++b) {
      const double by = -half.y + 2.0 * half.y * b / (ny - 1);
      const auto [wx, wy] = world_xy(robot, rot, bx, by);
      if (map.height_at(wx, wy) > bottom) return true;
    }
  }

  // Thigh capsules: sampled along the link from its root to the knee.
  constexpr int kThighSamples = 5;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const JointAngles q = {robot.q[i * 3], robot.q[i * 3 + 1], robot.q[i * 3 + 2]};
    const Vec3 hip = params.body.hip_positions[i];
    const Vec3 root = hip + thigh_root(q, params.legs[i]);
    const Vec3 knee = hip + knee_position(q, params.legs[i]);
    for (int k = 0; k < kThighSamples; ++k) {
      const double s = static_cast<double>(k) / (kThighSamples - 1);
      const Vec3 p = root + s * (knee - root);
      const auto [wx, wy] = world_xy(robot, rot, p.x, p.y);
      if (foot_world_z(robot, p) - params.body.thigh_radius < map.height_at(wx, wy)) return true;
    }
  }
  return false;
}

Termination check_termination(const RobotState& robot, const Heightmap& map,
                              const SimParams& params, double time, double episode_length) {
  if (in_collision(robot, map, params)) return Termination::kCollision;
  if (time >= episode_length - 1e-9) return Termination::kTimeout;
  return Termination::kRunning;
}

void EpisodeConfig::validate() const {
  auto ordered = [](const Range& r, const char* name) {
    if (!(r.hi >= r.lo)) throw RangeError(std::string("range ") + name + " has hi < lo");
  };
  ordered(cmd_vx, "cmd_vx");
  ordered(cmd_vy, "cmd_vy");
  ordered(cmd_wz, "cmd_wz");
  ordered(mass_scale, "mass_scale");
  ordered(added_mass, "added_mass");
  ordered(friction, "friction");
  ordered(kp, "kp");
  ordered(kd, "kd");
  ordered(h_range, "h_range");
  ordered(gc_range, "gc_range");
  ordered(gp_range, "gp_range");
  if (!(episode_length > 0.0)) throw RangeError("episode length must be positive");
  if (!(command_resample_period > 0.0)) throw RangeError("resample period must be positive");
  if (!(push_magnitude >= 0.0)) throw RangeError("push magnitude must be >= 0");
  if (!(push_period > 0.0)) throw RangeError("push period must be positive");
  if (!(extero_noise_std >= 0.0)) throw RangeError("noise std must be >= 0");
}

VelocityCommand resample_commands(std::mt19937_64& rng, const EpisodeConfig& cfg) {
  VelocityCommand c;
  c.vx = sample(rng, cfg.cmd_vx);
  c.vy = sample(rng, cfg.cmd_vy);
  c.wz = sample(rng, cfg.cmd_wz);
  return c;
}

RobotState apply_push(const RobotState& robot, std::mt19937_64& rng, double magnitude,
                      double mass_ratio) {
  if (!(magnitude >= 0.0)) throw RangeError("push magnitude must be >= 0");
  RobotState r = robot;
  if (magnitude == 0.0) return r;
  const double angle = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  const double size =
      std::uniform_real_distribution<double>(0.0, magnitude)(rng) * std::min(1.0, mass_ratio);
  const double wx = size * std::cos(angle);
  const double wy = size * std::sin(angle);
  r.push_vx += wx;
  r.push_vy += wy;
  const Rotation2 rot(r.yaw);
  const auto [bx, by] = rot.inverse(wx, wy);
  r.lin_vel.x += bx;
  r.lin_vel.y += by;
  return r;
}

DynamicsParams randomize_dynamics(std::mt19937_64& rng, const EpisodeConfig& cfg) {
  DynamicsParams d;
  if (!cfg.randomize_dynamics) return d;
  d.mass_scale = sample(rng, cfg.mass_scale);
  d.added_mass = sample(rng, cfg.added_mass);
  d.friction = sample(rng, cfg.friction);
  d.gains.kp = sample(rng, cfg.kp);
  d.gains.kd = sample(rng, cfg.kd);
  return d;
}

GaitShapeParams randomize_gait(std::mt19937_64& rng, const EpisodeConfig& cfg,
                               const GaitShapeParams& nominal) {
  GaitShapeParams g = nominal;
  if (!cfg.randomize_gait) return g;
  g.h = sample(rng, cfg.h_range);
  g.g_c = sample(rng, cfg.gc_range);
  g.g_p = sample(rng, cfg.gp_range);
  return g;
}

}  // namespace cpgloco
