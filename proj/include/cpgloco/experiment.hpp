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

// Batch evaluation: independent episodes run on worker threads, merged in
// trial order, summarized and written as CSV and JSON lines.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cpgloco/config.hpp"
#include "cpgloco/environment.hpp"
#include "cpgloco/metrics.hpp"

namespace cpgloco {

inline constexpr int kSummarySchemaVersion = 1;

struct SummaryRow {
  std::string label;
  double coupling_weight = 0.0;
  double proprio_delay_s = 0.0;
  double extero_delay_s = 0.0;
  int trials = 0;
  double success_rate = 0.0;
  double cost_of_transport = 0.0;  // mean over trials with a defined value
  int cot_trials = 0;
  double mean_velocity = 0.0;
  double mean_frequency_hz = 0.0;
  double mean_amplitude_rx = 0.0;
  double mean_angular_velocity = 0.0;
  double mean_joint_acceleration = 0.0;
  double mean_phase_residual = 0.0;
  double mean_reward = 0.0;
  double mean_duration = 0.0;
};

struct TrialResult {
  int index = 0;
  std::uint64_t seed = 0;
  EpisodeMetrics metrics;
  Termination termination = Termination::kRunning;
  std::vector<StepRecord> trace;
};

struct ExperimentResult {
  SummaryRow summary;
  std::vector<TrialResult> trials;
};

// Seed of trial `index`.
std::uint64_t trial_seed(std::uint64_t seed, int index);

SummaryRow summarize(const std::string& label, const ExperimentSpec& spec,
                     const std::vector<TrialResult>& trials);

// Runs spec.trials episodes. Traces are kept when spec.output.traces is set.
// Writes nothing.
ExperimentResult run_experiment(const ExperimentSpec& spec);

inline const std::vector<double> kDefaultCouplingWeights = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
inline const std::vector<double> kDefaultDelaysS = {0.0, 0.03, 0.06, 0.09};

// One result per weight, in order. Each row uses the trot network at that weight.
std::vector<ExperimentResult> sweep_coupling(const ExperimentSpec& spec,
                                             const std::vector<double>& weights =
                                                 kDefaultCouplingWeights);

// One result per delay, applied to both proprioception and exteroception.
std::vector<ExperimentResult> sweep_delay(const ExperimentSpec& spec,
                                          const std::vector<double>& delays_s = kDefaultDelaysS);

std::vector<std::string> summary_columns();
std::string summary_csv_row(const SummaryRow& row);
std::string summary_json_row(const SummaryRow& row);

// Writes summary.{csv,jsonl}, episodes.jsonl and, when traced, one trace per
// trial under traces/<row label>/ into `dir`.
void write_results(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const std::vector<ExperimentResult>& results);

void write_trace_csv(const std::filesystem::path& path, const std::vector<StepRecord>& trace);
void write_trace_jsonl(const std::filesystem::path& path, const std::vector<StepRecord>& trace);

}  // namespace cpgloco
