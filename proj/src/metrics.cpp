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

#include "cpgloco/metrics.hpp"

#include <cmath>

namespace cpgloco {

double tracking_kernel(double error, double width) { return std::exp(-(error * error) / width); }

double mechanical_power(const JointVector& tau, const JointVector& qdot, PowerMode mode) {
  double sum = 0.0;
  if (mode == PowerMode::kPerJointAbs) {
    for (std::size_t k = 0; k < kNumJoints; ++k) sum += std::abs(tau[k] * qdot[k]);
    return sum;
  }
  for (std::size_t k = 0; k < kNumJoints; ++k) sum += tau[k] * qdot[k];
  return std::abs(sum);
}

RewardTerms reward_step(const Vec3& lin_vel, const Vec3& ang_vel, double power,
                        const VelocityCommand& cmd, const RewardWeights& w) {
  const double vx = w.track_vx * tracking_kernel(cmd.vx - lin_vel.x, w.kernel_width);
  const double vy = w.track_vy * tracking_kernel(cmd.vy - lin_vel.y, w.kernel_width);
  const double wz = w.track_wz * tracking_kernel(cmd.wz - ang_vel.z, w.kernel_width);
  const double vz = -w.vz * lin_vel.z * lin_vel.z;
  const double wxy = -w.wxy * (ang_vel.x * ang_vel.x + ang_vel.y * ang_vel.y);
  const double pw = -w.power * std::abs(power);
  RewardTerms r;
  r.track_vx = w.dt * vx;
  r.track_vy = w.dt * vy;
  r.track_wz = w.dt * wz;
  r.penalty_vz = w.dt * vz;
  r.penalty_wxy = w.dt * wxy;
  r.penalty_power = w.dt * pw;
  // Summing before scaling keeps the perfect-tracking value at 4.25 * dt.
  r.total = w.dt * (vx + vy + wz + vz + wxy + pw);
  return r;
}

RewardTerms reward_step(const Vec3& lin_vel, const Vec3& ang_vel, const JointVector& tau,
                        const JointVector& qdot, const VelocityCommand& cmd,
                        const RewardWeights& weights, PowerMode mode) {
  return reward_step(lin_vel, ang_vel, mechanical_power(tau, qdot, mode), cmd, weights);
}

CostOfTransport cost_of_transport(double mean_power_w, double mass_kg, double mean_speed_mps) {
  if (!(mean_speed_mps > 0.0) || !(mass_kg > 0.0)) return {0.0, false};
  return {mean_power_w / (mass_kg * kGravity * mean_speed_mps), true};
}

void MetricsAccumulator::add(const TraceSample& s) {
  if (count_ == 0) {
    t_first_ = s.t;
  } else {
    const double dt = s.t - t_last_;
    if (dt > 0.0) {
      double a = 0.0;
      for (std::size_t k = 0; k < kNumJoints; ++k) a += std::abs(s.qdot[k] - last_qdot_[k]) / dt;
      accel_sum_ += a / kNumJoints;
      ++accel_count_;
    }
  }
  t_last_ = s.t;
  last_qdot_ = s.qdot;
  ++count_;

  speed_sum_ += std::hypot(s.lin_vel.x, s.lin_vel.y);
  angvel_sum_ += norm(s.ang_vel);
  power_sum_ += s.power;
  double f = 0.0;
  double rx = 0.0;
  for (const auto& o : s.cpg.legs) {
    f += o.theta_dot / kTwoPi;
    rx += o.r_x;
  }
  freq_sum_ += f / kNumLegs;
  rx_sum_ += rx / kNumLegs;
  residual_sum_ += pattern_residual(s.cpg, phase_biases_);
}

EpisodeMetrics MetricsAccumulator::result(double mass_kg, bool collided, bool completed) const {
  EpisodeMetrics m;
  m.mass = mass_kg;
  m.collided = collided;
  m.completed = completed;
  m.success = completed && !collided;
  m.total_reward = reward_;
  if (count_ == 0) return m;
  const double n = static_cast<double>(count_);
  m.duration = t_last_ - t_first_;
  m.mean_velocity = speed_sum_ / n;
  m.mean_frequency_hz = freq_sum_ / n;
  m.mean_amplitude_rx = rx_sum_ / n;
  m.mean_angular_velocity = angvel_sum_ / n;
  m.mean_power = power_sum_ / n;
  m.mean_phase_residual = residual_sum_ / n;
  m.mean_joint_acceleration = accel_count_ > 0 ? accel_sum_ / accel_count_ : 0.0;
  const CostOfTransport cot = cost_of_transport(m.mean_power, mass_kg, m.mean_velocity);
  m.cost_of_transport = cot.value;
  m.cot_defined = cot.defined;
  return m;
}

EpisodeMetrics episode_metrics(std::span<const TraceSample> trace, double mass_kg, bool collided,
                               bool completed, const Matrix4& phase_biases) {
  MetricsAccumulator acc(phase_biases);
  for (const auto& s : trace) acc.add(s);
  return acc.result(mass_kg, collided, completed);
}

}  // namespace cpgloco
