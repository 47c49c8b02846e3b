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

// Policy observation layout and sensor delay injection.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpgloco/cpg.hpp"
#include "cpgloco/metrics.hpp"
#include "cpgloco/sim_env.hpp"
#include "cpgloco/terrain.hpp"

namespace cpgloco {

// Block sizes and offsets, in concatenation order. The CPG block is grouped by
// variable: r_x[4], r_x'[4], r_y[4], r_y'[4], cos(theta)[4], sin(theta)[4],
// theta'[4].
namespace obs_layout {
inline constexpr int kVersion = 1;
inline constexpr std::size_t kCommands = 3;
inline constexpr std::size_t kHeights = kHeightSamples;
inline constexpr std::size_t kOrientation = 3;
inline constexpr std::size_t kLinVel = 3;
inline constexpr std::size_t kAngVel = 3;
inline constexpr std::size_t kJointPos = kNumJoints;
inline constexpr std::size_t kJointVel = kNumJoints;
inline constexpr std::size_t kContacts = kNumLegs;
inline constexpr std::size_t kLastAction = 12;
inline constexpr std::size_t kCpg = 7 * kNumLegs;

inline constexpr std::size_t kCommandsOffset = 0;
inline constexpr std::size_t kHeightsOffset = kCommandsOffset + kCommands;
inline constexpr std::size_t kOrientationOffset = kHeightsOffset + kHeights;
inline constexpr std::size_t kLinVelOffset = kOrientationOffset + kOrientation;
inline constexpr std::size_t kAngVelOffset = kLinVelOffset + kLinVel;
inline constexpr std::size_t kJointPosOffset = kAngVelOffset + kAngVel;
inline constexpr std::size_t kJointVelOffset = kJointPosOffset + kJointPos;
inline constexpr std::size_t kContactsOffset = kJointVelOffset + kJointVel;
inline constexpr std::size_t kLastActionOffset = kContactsOffset + kContacts;
inline constexpr std::size_t kCpgOffset = kLastActionOffset + kLastAction;
inline constexpr std::size_t kSize = kCpgOffset + kCpg;

// Proprioceptive part (orientation .. contacts) as one contiguous span.
inline constexpr std::size_t kProprioOffset = kOrientationOffset;
inline constexpr std::size_t kProprio = kLastActionOffset - kOrientationOffset;
}  // namespace obs_layout

static_assert(obs_layout::kSize == 267);

using Observation = std::array<double, obs_layout::kSize>;
using ActionVector = std::array<double, 12>;

// Orientation (roll, pitch, yaw), body velocities, joint state and contacts
// (1 / 0) in observation order.
using ProprioFrame = std::array<double, obs_layout::kProprio>;
using HeightFrame = std::vector<double>;

ProprioFrame proprio_frame(const RobotState& robot);

// Throws LayoutError when `heights` does not hold exactly 187 samples.
Observation build_observation(const ProprioFrame& proprio, const CpgState& cpg,
                              const VelocityCommand& commands, const ActionVector& last_action,
                              std::span<const double> heights);

// View of one block of `obs`.
std::span<const double> observation_block(const Observation& obs, std::size_t offset,
                                          std::size_t size);

std::string observation_schema_json();

// Converts a delay to a whole number of ticks. Throws RangeError when the
// delay is negative or not a multiple of the period.
std::size_t delay_ticks(double delay_s, double period_s);

// Ring buffer of frames recorded once per tick; read(t) returns the frame
// recorded delay ticks earlier. Before that, the earliest frame is returned
// and flagged as startup.
template <class Frame>
class DelayLine {
 public:
  struct Read {
    const Frame* frame = nullptr;  // null only when nothing was recorded
    bool startup = false;
    std::int64_t tick = -1;        // tick at which the returned frame was recorded
  };

  DelayLine() : DelayLine(0) {}
  explicit DelayLine(std::size_t delay_ticks) : delay_(delay_ticks), slots_(delay_ticks + 1) {}
  DelayLine(double delay_s, double period_s)
      : DelayLine(cpgloco::delay_ticks(delay_s, period_s)) {
    period_ = period_s;
  }

  std::size_t delay() const { return delay_; }
  std::size_t depth() const { return slots_.size(); }
  bool empty() const { return count_ == 0; }

  void clear() {
    count_ = 0;
    first_tick_ = last_tick_ = -1;
  }

  // Ticks must be consecutive.
  void record(std::int64_t tick, Frame frame) {
    if (count_ > 0 && tick != last_tick_ + 1) {
      throw RangeError("delay line ticks must be consecutive");
    }
    if (count_ == 0) first_tick_ = tick;
    slots_[static_cast<std::size_t>(tick) % slots_.size()] = std::move(frame);
    last_tick_ = tick;
    ++count_;
  }

  void record_at(double t, Frame frame) { record(to_tick(t), std::move(frame)); }

  Read read(std::int64_t tick) const {
    Read r;
    if (count_ == 0) {
      r.startup = true;
      return r;
    }
    std::int64_t want = tick - static_cast<std::int64_t>(delay_);
    const std::int64_t oldest =
        std::max(first_tick_, last_tick_ - static_cast<std::int64_t>(slots_.size()) + 1);
    if (want < first_tick_) {
      want = first_tick_;
      r.startup = true;
    }
    if (want > last_tick_ || want < oldest) {
      throw RangeError("delay line read outside the recorded window");
    }
    r.frame = &slots_[static_cast<std::size_t>(want) % slots_.size()];
    r.tick = want;
    return r;
  }

  Read read_at(double t) const { return read(to_tick(t)); }

 private:
  std::int64_t to_tick(double t) const {
    return static_cast<std::int64_t>(std::llround(t / period_));
  }

  std::size_t delay_;
  std::vector<Frame> slots_;
  double period_ = 0.01;
  std::size_t count_ = 0;
  std::int64_t first_tick_ = -1;
  std::int64_t last_tick_ = -1;
};

// 31 * m^0.21 milliseconds.
double expected_sensorimotor_delay_ms(double mass_kg);

}  // namespace cpgloco
