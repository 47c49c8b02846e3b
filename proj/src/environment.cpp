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

#include "cpgloco/environment.hpp"

#include <cmath>

namespace cpgloco {
namespace {

std::size_t ticks_of(double period, double dt, const char* what) {
  try {
    const std::size_t n = delay_ticks(period, dt);
    if (n == 0) throw RangeError("");
    return n;
  } catch (const RangeError&) {
    throw RangeError(std::string(what) + " must be a positive multiple of the policy period");
  }
}

}  // namespace

VelocityCommand CommandSchedule::at(double t) const {
  VelocityCommand cmd = base;
  for (const CommandSegment& s : segments) {
    if (t >= s.t_begin && t < s.t_end) cmd = s.command;
  }
  return cmd;
}

void EnvironmentConfig::validate() const {
  sim.validate();
  episode.validate();
  if (!(policy_dt > 0.0)) throw RangeError("policy period must be positive");
  if (substeps < 1) throw RangeError("substeps must be at least 1");
  if (std::abs(substeps * sim.cpg.dt - policy_dt) > 1e-12) {
    throw RangeError("substeps times the simulation step must equal the policy period");
  }
  delay_ticks(delay.proprio_s, policy_dt);
  delay_ticks(delay.extero_s, policy_dt);
  ticks_of(delay.extero_update_period, policy_dt, "exteroceptive update period");
  if (grid.rows * grid.cols != kHeightSamples) {
    throw LayoutError("height grid must hold " + std::to_string(kHeightSamples) + " samples");
  }
  for (const CommandSegment& s : schedule.segments) {
    if (!(s.t_end >= s.t_begin)) throw RangeError("command segment ends before it begins");
  }
}

std::mt19937_64 make_stream(std::uint64_t seed, RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Environment::Environment(std::shared_ptr<const World> world, EnvironmentConfig config)
    : world_(std::move(world)), config_(std::move(config)), params_(config_.sim) {
  if (!world_) throw SpecError("environment needs a world");
  config_.validate();
  substep_ticks_ = static_cast<std::size_t>(config_.substeps);
  extero_period_ticks_ =
      ticks_of(config_.delay.extero_update_period, config_.policy_dt, "exteroceptive update period");
  proprio_line_ = DelayLine<ProprioFrame>(config_.delay.proprio_s, config_.policy_dt);
  extero_line_ = DelayLine<HeightFrame>(config_.delay.extero_s, config_.policy_dt);
}

const Observation& Environment::reset(std::uint64_t seed) {
  std::mt19937_64 cpg_rng = make_stream(seed, RngStream::kCpgInit);
  std::mt19937_64 dyn_rng = make_stream(seed, RngStream::kDynamics);
  std::mt19937_64 gait_rng = make_stream(seed, RngStream::kGait);
  noise_rng_ = make_stream(seed, RngStream::kTerrainNoise);
  command_rng_ = make_stream(seed, RngStream::kCommands);
  push_rng_ = make_stream(seed, RngStream::kPush);

  params_ = config_.sim;
  if (config_.episode.randomize_dynamics) {
    params_.dynamics = randomize_dynamics(dyn_rng, config_.episode);
  }
  if (config_.episode.randomize_gait) {
    params_.gait = randomize_gait(gait_rng, config_.episode, config_.sim.gait);
  }

  switch (config_.initial_phase) {
    case InitialPhase::kPattern:
      cpg_ = pattern_state(params_.cpg.phase_biases);
      break;
    case InitialPhase::kRandom:
      cpg_ = initial_state(cpg_rng);
      break;
    case InitialPhase::kZero:
      cpg_ = CpgState{};
      break;
  }
  robot_ = initial_robot_state(cpg_, world_->spawn, world_->map, params_);
  tick_ = 0;
  termination_ = Termination::kRunning;
  last_action_ = scaler_.normalize(ModulationCommand{});
  next_resample_tick_ = 0;
  next_push_tick_ = static_cast<std::int64_t>(
      std::llround(config_.episode.push_period / config_.policy_dt));
  update_commands();

  proprio_line_.clear();
  extero_line_.clear();
  held_heights_.clear();
  metrics_ = MetricsAccumulator(params_.cpg.phase_biases);
  metrics_.add({0.0, robot_.lin_vel, robot_.ang_vel, robot_.qdot, cpg_, 0.0});
  trace_.clear();
  started_ = true;
  sense();
  return obs_;
}

void Environment::update_commands() {
  if (config_.command_mode == CommandMode::kSchedule) {
    commands_ = config_.schedule.at(time());
    return;
  }
  if (tick_ >= next_resample_tick_) {
    commands_ = resample_commands(command_rng_, config_.episode);
    next_resample_tick_ =
        tick_ + std::llround(config_.episode.command_resample_period / config_.policy_dt);
  }
}

void Environment::sense() {
  proprio_line_.record(tick_, proprio_frame(robot_));
  if (held_heights_.empty() || tick_ % static_cast<std::int64_t>(extero_period_ticks_) == 0) {
    const BasePose pose{robot_.position.x, robot_.position.y, robot_.position.z, robot_.yaw};
    held_heights_ = sample_height_grid(world_->map, pose, config_.episode.extero_noise_std,
                                       noise_rng_, config_.grid);
  }
  extero_line_.record(tick_, held_heights_);

  const auto proprio = proprio_line_.read(tick_);
  const auto extero = extero_line_.read(tick_);
  startup_ = proprio.startup || extero.startup;
  obs_ = build_observation(*proprio.frame, cpg_, commands_, last_action_, *extero.frame);
}

StepResult Environment::step(const ModulationCommand& action) {
  if (!started_) throw SpecError("environment stepped before reset");
  if (done()) throw SpecError("environment stepped after the episode ended");
  const ModulationCommand cmd = action.clamped();
  last_action_ = scaler_.normalize(cmd);

  double power_sum = 0.0;
  int executed = 0;
  bool collided = false;
  const double sim_dt = params_.cpg.dt;
  const double t0 = time();
  for (std::size_t k = 0; k < substep_ticks_; ++k) {
    const SubstepOutcome out = simulate_step_1khz(robot_, cpg_, cmd, world_->map, params_);
    power_sum += out.power;
    ++executed;
    metrics_.add({t0 + executed * sim_dt, robot_.lin_vel, robot_.ang_vel, robot_.qdot, cpg_,
                  out.power});
    if (out.collision) {
      collided = true;
      break;
    }
  }
  ++tick_;

  if (config_.episode.push_enabled && tick_ >= next_push_tick_) {
    robot_ = apply_push(robot_, push_rng_, config_.episode.push_magnitude,
                        params_.nominal_mass / params_.total_mass());
    next_push_tick_ += std::llround(config_.episode.push_period / config_.policy_dt);
  }

  StepResult result;
  result.reward = reward_step(robot_.lin_vel, robot_.ang_vel, power_sum / executed, commands_,
                              config_.reward);
  metrics_.add_reward(result.reward.total);
  if (record_trace_) {
    trace_.push_back({time(), commands_, cmd, robot_, cpg_, result.reward});
  }

  termination_ = collided ? Termination::kCollision
                          : check_termination(robot_, world_->map, params_, time(),
                                              config_.episode.episode_length);
  result.termination = termination_;
  result.done = done();

  update_commands();
  sense();
  return result;
}

EpisodeMetrics Environment::rollout(Policy& policy, std::uint64_t seed) {
  policy.reset();
  reset(seed);
  while (!done()) step(policy.evaluate(obs_));
  return metrics();
}

EpisodeMetrics Environment::metrics() const {
  return metrics_.result(params_.total_mass(), termination_ == Termination::kCollision,
                         termination_ == Termination::kTimeout);
}

}  // namespace cpgloco
