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

// Per-step reward and episode-level evaluation metrics.

#pragma once

#include <cstdint>
#include <span>

#include "cpgloco/common.hpp"
#include "cpgloco/cpg.hpp"

namespace cpgloco {

struct VelocityCommand {
  double vx = 0.0;  // m/s, body x
  double vy = 0.0;  // m/s, body y
  double wz = 0.0;  // rad/s, yaw rate

  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

// Term weights are multiplied by dt (the policy period).
struct RewardWeights {
  double dt = 0.01;
  double track_vx = 3.0;
  double track_vy = 0.75;
  double track_wz = 0.5;
  double vz = 2.0;
  double wxy = 0.05;
  double power = 0.001;
  double kernel_width = 0.25;
};

struct RewardTerms {
  double track_vx = 0.0;
  double track_vy = 0.0;
  double track_wz = 0.0;
  double penalty_vz = 0.0;
  double penalty_wxy = 0.0;
  double penalty_power = 0.0;
  double total = 0.0;
};

enum class PowerMode {
  kPerJointAbs,  // sum_k |tau_k * qdot_k|
  kAbsOfSum,     // |sum_k tau_k * qdot_k|
};

// exp(-error^2 / width)
double tracking_kernel(double error, double width);

double mechanical_power(const JointVector& tau, const JointVector& qdot, PowerMode mode);

// Velocities are body-frame; power is in watts.
RewardTerms reward_step(const Vec3& lin_vel, const Vec3& ang_vel, double power,
                        const VelocityCommand& cmd, const RewardWeights& weights = {});

RewardTerms reward_step(const Vec3& lin_vel, const Vec3& ang_vel, const JointVector& tau,
                        const JointVector& qdot, const VelocityCommand& cmd,
                        const RewardWeights& weights = {},
                        PowerMode mode = PowerMode::kPerJointAbs);

struct CostOfTransport {
  double value = 0.0;
  bool defined = false;  // false when the mean speed is not positive
};

// P / (m g v)
CostOfTransport cost_of_transport(double mean_power_w, double mass_kg, double mean_speed_mps);

struct TraceSample {
  double t = 0.0;
  Vec3 lin_vel;  // body frame
  Vec3 ang_vel;  // body frame
  JointVector qdot{};
  CpgState cpg;
  double power = 0.0;
};

struct EpisodeMetrics {
  double cost_of_transport = 0.0;
  bool cot_defined = false;
  double mean_velocity = 0.0;           // m/s, mean horizontal base speed
  double mean_frequency_hz = 0.0;       // mean theta_dot / 2 pi over legs and time
  double mean_amplitude_rx = 0.0;
  double mean_angular_velocity = 0.0;   // rad/s, mean |omega_b|
  double mean_joint_acceleration = 0.0; // rad/s^2, mean |qddot| over joints and time
  double mean_power = 0.0;              // W
  double mean_phase_residual = 0.0;     // against the configured phase biases
  double total_reward = 0.0;
  double duration = 0.0;                // s
  double mass = 0.0;                    // kg, used for COT
  bool collided = false;
  bool completed = false;
  bool success = false;
};

// Streaming form of episode_metrics for long rollouts.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(const Matrix4& phase_biases = {}) : phase_biases_(phase_biases) {}

  void add(const TraceSample& sample);
  void add_reward(double r) { reward_ += r; }
  std::size_t samples() const { return count_; }

  // success = completed and not collided.
  EpisodeMetrics result(double mass_kg, bool collided, bool completed) const;

 private:
  Matrix4 phase_biases_;
  std::size_t count_ = 0;
  std::size_t accel_count_ = 0;
  double t_first_ = 0.0;
  double t_last_ = 0.0;
  JointVector last_qdot_{};
  double speed_sum_ = 0.0;
  double freq_sum_ = 0.0;
  double rx_sum_ = 0.0;
  double angvel_sum_ = 0.0;
  double accel_sum_ = 0.0;
  double power_sum_ = 0.0;
  double residual_sum_ = 0.0;
  double reward_ = 0.0;
};

EpisodeMetrics episode_metrics(std::span<const TraceSample> trace, double mass_kg, bool collided,
                               bool completed, const Matrix4& phase_biases = {});

}  // namespace cpgloco
