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

// Episode state machine: the 100 Hz policy loop around the 1 kHz simulation,
// with command scheduling, pushes, randomization, delayed sensing and reward.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "cpgloco/metrics.hpp"
#include "cpgloco/observation.hpp"
#include "cpgloco/policy.hpp"
#include "cpgloco/sim_env.hpp"
#include "cpgloco/terrain.hpp"

namespace cpgloco {

struct DelayConfig {
  double proprio_s = 0.0;
  double extero_s = 0.0;
  // Height samples are refreshed at this period and held in between.
  double extero_update_period = 0.1;
};

// Velocity command active on [t_begin, t_end).
struct CommandSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  VelocityCommand command;
};

// Piecewise-constant commands: the last segment covering t wins, `base`
// applies elsewhere.
struct CommandSchedule {
  VelocityCommand base;
  std::vector<CommandSegment> segments;

  VelocityCommand at(double t) const;
};

enum class CommandMode { kSchedule, kRandom };

enum class InitialPhase {
  kPattern,  // phases at the configured phase biases
  kRandom,   // uniform phases
  kZero,
};

struct EnvironmentConfig {
  SimParams sim;
  EpisodeConfig episode;
  DelayConfig delay;
  HeightGridOptions grid;
  RewardWeights reward;
  double policy_dt = 0.01;
  int substeps = 10;
  CommandMode command_mode = CommandMode::kSchedule;
  CommandSchedule schedule;
  InitialPhase initial_phase = InitialPhase::kPattern;

  void validate() const;
};

// Independent random streams of one episode.
enum class RngStream : std::uint64_t {
  kCpgInit = 1,
  kTerrainNoise = 2,
  kCommands = 3,
  kPush = 4,
  kDynamics = 5,
  kGait = 6,
};

std::mt19937_64 make_stream(std::uint64_t seed, RngStream stream);

struct StepRecord {
  double t = 0.0;  // time at the end of the step
  VelocityCommand commands;
  ModulationCommand action;
  RobotState robot;
  CpgState cpg;
  RewardTerms reward;
};

struct StepResult {
  RewardTerms reward;
  Termination termination = Termination::kRunning;
  bool done = false;
};

class Environment {
 public:
  Environment(std::shared_ptr<const World> world, EnvironmentConfig config);

  // Starts a new episode and returns its first observation.
  const Observation& reset(std::uint64_t seed);

  // Applies one policy action for `substeps` 1 kHz substeps.
  StepResult step(const ModulationCommand& action);

  // Runs `policy` until the episode ends. Returns the metrics.
  EpisodeMetrics rollout(Policy& policy, std::uint64_t seed);

  const Observation& observation() const { return obs_; }
  const RobotState& robot() const { return robot_; }
  const CpgState& cpg() const { return cpg_; }
  const SimParams& params() const { return params_; }
  const EnvironmentConfig& config() const { return config_; }
  const World& world() const { return *world_; }
  VelocityCommand commands() const { return commands_; }
  double time() const { return static_cast<double>(tick_) * config_.policy_dt; }
  std::int64_t tick() const { return tick_; }
  bool done() const { return termination_ != Termination::kRunning; }
  Termination termination() const { return termination_; }
  // Whether the current observation used startup frames of a delay line.
  bool startup_frames() const { return startup_; }

  EpisodeMetrics metrics() const;

  void set_record_trace(bool on) { record_trace_ = on; }
  const std::vector<StepRecord>& trace() const { return trace_; }

 private:
  void sense();
  void update_commands();

  std::shared_ptr<const World> world_;
  EnvironmentConfig config_;
  SimParams params_;
  ActionScaler scaler_;
  std::size_t extero_period_ticks_ = 10;
  std::size_t substep_ticks_ = 10;

  std::mt19937_64 noise_rng_, command_rng_, push_rng_;
  RobotState robot_;
  CpgState cpg_;
  VelocityCommand commands_;
  ActionVector last_action_{};
  std::int64_t tick_ = 0;
  std::int64_t next_resample_tick_ = 0;
  std::int64_t next_push_tick_ = 0;
  Termination termination_ = Termination::kRunning;
  bool started_ = false;
  bool startup_ = false;

  DelayLine<ProprioFrame> proprio_line_;
  DelayLine<HeightFrame> extero_line_;
  HeightFrame held_heights_;
  Observation obs_{};

  MetricsAccumulator metrics_;
  bool record_trace_ = false;
  std::vector<StepRecord> trace_;
};

}  // namespace cpgloco
