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

#include "cpgloco/observation.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace cpgloco {

ProprioFrame proprio_frame(const RobotState& robot) {
  ProprioFrame f{};
  std::size_t k = 0;
  f[k++] = robot.roll;
  f[k++] = robot.pitch;
  f[k++] = robot.yaw;
  f[k++] = robot.lin_vel.x;
  f[k++] = robot.lin_vel.y;
  f[k++] = robot.lin_vel.z;
  f[k++] = robot.ang_vel.x;
  f[k++] = robot.ang_vel.y;
  f[k++] = robot.ang_vel.z;
  for (double q : robot.q) f[k++] = q;
  for (double qd : robot.qdot) f[k++] = qd;
  for (bool c : robot.contacts) f[k++] = c ? 1.0 : 0.0;
  return f;
}

Observation build_observation(const ProprioFrame& proprio, const CpgState& cpg,
                              const VelocityCommand& commands, const ActionVector& last_action,
                              std::span<const double> heights) {
  namespace L = obs_layout;
  if (heights.size() != L::kHeights) {
    throw LayoutError("height block holds " + std::to_string(heights.size()) +
                      " samples, expected " + std::to_string(L::kHeights));
  }
  Observation obs{};
  obs[L::kCommandsOffset + 0] = commands.vx;
  obs[L::kCommandsOffset + 1] = commands.vy;
  obs[L::kCommandsOffset + 2] = commands.wz;
  std::copy(heights.begin(), heights.end(), obs.begin() + L::kHeightsOffset);
  std::copy(proprio.begin(), proprio.end(), obs.begin() + L::kProprioOffset);
  std::copy(last_action.begin(), last_action.end(), obs.begin() + L::kLastActionOffset);

  double* c = obs.data() + L::kCpgOffset;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const OscillatorState& o = cpg.legs[i];
    c[0 * kNumLegs + i] = o.r_x;
    c[1 * kNumLegs + i] = o.rdot_x;
    c[2 * kNumLegs + i] = o.r_y;
    c[3 * kNumLegs + i] = o.rdot_y;
    c[4 * kNumLegs + i] = std::cos(o.theta);
    c[5 * kNumLegs + i] = std::sin(o.theta);
    c[6 * kNumLegs + i] = o.theta_dot;
  }
  return obs;
}

std::span<const double> observation_block(const Observation& obs, std::size_t offset,
                                          std::size_t size) {
  if (offset + size > obs.size()) throw LayoutError("observation block out of range");
  return {obs.data() + offset, size};
}

std::string observation_schema_json() {
  namespace L = obs_layout;
  using nlohmann::ordered_json;
  const char* legs[] = {"FL", "FR", "HL", "HR"};
  auto per_leg = [&](const std::string& prefix) {
    ordered_json names = ordered_json::array();
    for (const char* l : legs) names.push_back(prefix + "_" + l);
    return names;
  };
  auto per_joint = [&](const std::string& prefix) {
    const char* joints[] = {"hip_abduction", "hip_pitch", "knee"};
    ordered_json names = ordered_json::array();
    for (const char* l : legs) {
      for (const char* j : joints) names.push_back(prefix + "_" + l + "_" + j);
    }
    return names;
  };
  auto block = [](const char* name, std::size_t offset, std::size_t size, ordered_json names,
                  const char* units) {
    ordered_json b;
    b["name"] = name;
    b["offset"] = offset;
    b["size"] = size;
    b["units"] = units;
    b["entries"] = std::move(names);
    return b;
  };

  ordered_json heights = ordered_json::array();
  const HeightGridOptions grid;
  for (int k = 0; k < kHeightSamples; ++k) {
    auto [dx, dy] = height_grid_offset(k, grid);
    heights.push_back({{"index", k}, {"dx", dx}, {"dy", dy}});
  }
  ordered_json cpg = ordered_json::array();
  for (const char* v : {"r_x", "rdot_x", "r_y", "rdot_y", "cos_theta", "sin_theta", "theta_dot"}) {
    for (auto& n : per_leg(v)) cpg.push_back(n);
  }
  ordered_json actions = per_leg("mu_x");
  for (auto& n : per_leg("mu_y")) actions.push_back(n);
  for (auto& n : per_leg("omega")) actions.push_back(n);

  ordered_json doc;
  doc["format"] = "cpgloco-observation";
  doc["layout_version"] = L::kVersion;
  doc["size"] = L::kSize;
  doc["blocks"] = ordered_json::array({
      block("commands", L::kCommandsOffset, L::kCommands, {"vx", "vy", "wz"}, "m/s, m/s, rad/s"),
      block("heights", L::kHeightsOffset, L::kHeights, heights, "m relative to nominal base height"),
      block("orientation", L::kOrientationOffset, L::kOrientation, {"roll", "pitch", "yaw"}, "rad"),
      block("linear_velocity", L::kLinVelOffset, L::kLinVel, {"vx", "vy", "vz"}, "m/s, body"),
      block("angular_velocity", L::kAngVelOffset, L::kAngVel, {"wx", "wy", "wz"}, "rad/s, body"),
      block("joint_positions", L::kJointPosOffset, L::kJointPos, per_joint("q"), "rad"),
      block("joint_velocities", L::kJointVelOffset, L::kJointVel, per_joint("qdot"), "rad/s"),
      block("contacts", L::kContactsOffset, L::kContacts, per_leg("contact"), "0/1"),
      block("last_action", L::kLastActionOffset, L::kLastAction, actions, "normalized [-1, 1]"),
      block("cpg", L::kCpgOffset, L::kCpg, cpg, "live, never delayed"),
  });
  doc["grid"] = {{"rows", grid.rows},
                 {"cols", grid.cols},
                 {"spacing", grid.spacing},
                 {"forward_offset", grid.forward_offset},
                 {"order", "row-major, back to front, right to left"}};
  return doc.dump(2);
}

std::size_t delay_ticks(double delay_s, double period_s) {
  if (!(period_s > 0.0) || !std::isfinite(period_s)) {
    throw RangeError("delay period must be positive");
  }
  if (!(delay_s >= 0.0) || !std::isfinite(delay_s)) {
    throw RangeError("sensor delay must be non-negative");
  }
  const double ticks = delay_s / period_s;
  const double rounded = std::round(ticks);
  if (std::abs(ticks - rounded) > 1e-6) {
    throw RangeError("sensor delay " + std::to_string(delay_s) +
                     " s is not a multiple of the period " + std::to_string(period_s) + " s");
  }
  return static_cast<std::size_t>(rounded);
}

double expected_sensorimotor_delay_ms(double mass_kg) {
  if (!(mass_kg > 0.0)) throw RangeError("mass must be positive");
  return 31.0 * std::pow(mass_kg, 0.21);
}

}  // namespace cpgloco
