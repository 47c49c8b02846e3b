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

// Experiment specification: a JSON document selecting the world, policy,
// sensing delays, network and gait parameters, command schedule and trials.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "cpgloco/environment.hpp"
#include "cpgloco/policy.hpp"
#include "cpgloco/terrain.hpp"

namespace cpgloco {

enum class WorldKind { kFlat, kCorridor, kNavigation, kGenerated, kFile };

const char* world_kind_name(WorldKind k);

struct WorldSpec {
  WorldKind kind = WorldKind::kFlat;
  double arena_size = 40.0;       // flat and generated
  double corridor_width = 1.7;    // corridor
  double corridor_length = 14.0;  // corridor
  double difficulty = 0.5;        // generated
  std::optional<std::uint64_t> seed;  // generated and navigation; defaults to the trial seed
  bool per_trial = false;         // regenerate for every trial
  std::string path;               // file
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kConstant;
  std::string weights;  // mlp / lstm
  ModulationCommand constant = ModulationCommand::uniform(2.0, 1.5, 1.5);
  VelocityProportionalParams vprop;
  // When set, the constant command is the velocity-proportional command for
  // this forward speed.
  std::optional<double> constant_speed;
  std::optional<Squash> squash;  // overrides the weight file
};

struct OutputSpec {
  std::string dir;  // empty: no files
  bool traces = true;
  bool csv = true;
  bool jsonl = true;
  bool append = false;  // append rows to existing summaries with the same schema
};

struct ExperimentSpec {
  std::string label = "experiment";
  WorldSpec world;
  PolicySpec policy;
  EnvironmentConfig env;
  double coupling_weight = 1.0;
  int trials = 1;
  std::uint64_t seed = 0;
  int threads = 1;  // 0: one per hardware thread
  OutputSpec output;

  void validate() const;
};

// Throws SpecError on unknown keys, unknown world or policy kinds and values
// that fail validation.
ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
std::string experiment_spec_json(const ExperimentSpec& spec);

// Builds the world of a spec for the given trial seed.
World build_world(const WorldSpec& spec, std::uint64_t trial_seed);
std::unique_ptr<Policy> build_policy(const PolicySpec& spec);

}  // namespace cpgloco
