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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cpgloco/config.hpp"
#include "cpgloco/experiment.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cpgloco;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(CPGLOCO_TEST_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cpgloco_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentSpec quick_spec() {
  return parse_experiment_spec(R"({
    "label": "quick",
    "world": {"kind": "flat", "arena_size": 20},
    "policy": {"kind": "vprop"},
    "episode": {"length": 1.5},
    "commands": {"vx": 0.3},
    "trials": 2,
    "seed": 5
  })");
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("spec files parse into the expected settings") {
  const ExperimentSpec c = load_experiment_spec(data("corridor.json"));
  CHECK(c.label == "corridor");
  CHECK(c.world.kind == WorldKind::kCorridor);
  CHECK(c.world.corridor_width == 1.7);
  CHECK(c.policy.kind == PolicyKind::kConstant);
  REQUIRE(c.policy.constant_speed.has_value());
  CHECK(*c.policy.constant_speed == 0.35);
  CHECK(c.env.episode.episode_length == 10.0);
  CHECK(c.env.schedule.base.vx == 0.35);
  CHECK(c.trials == 10);
  CHECK(c.seed == 7);

  const ExperimentSpec s = load_experiment_spec(data("fig4_schedule.json"));
  CHECK(s.env.schedule.at(5.0) == VelocityCommand{0.3, 0.0, 0.0});
  CHECK(s.env.schedule.at(12.0) == VelocityCommand{0.3, 0.4, 0.0});
  CHECK(s.env.schedule.at(16.0) == VelocityCommand{0.3, -0.4, 0.0});
  CHECK(s.env.schedule.at(20.0) == VelocityCommand{0.3, 0.0, 0.7});
  CHECK(s.env.schedule.at(23.0) == VelocityCommand{0.3, 0.0, 0.0});
}

TEST_CASE("spec errors are reported before anything runs") {
  CHECK_THROWS_AS(load_experiment_spec(data("bad_world.json")), SpecError);
  CHECK_THROWS_AS(load_experiment_spec(data("does_not_exist.json")), IoError);
  CHECK_THROWS_AS(parse_experiment_spec("{ not json"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"policy": {"kind": "oracle"}})"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"trials": 0})"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"tirals": 3})"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"world": {"kind": "flat", "widht": 2}})"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"policy": {"kind": "mlp"}})"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"delay": {"ms": 25}})"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"world": {"kind": "generated", "difficulty": 2}})"),
                  SpecError);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"trials": "many"})"), SpecError);
}

TEST_CASE("spec serialization round-trips") {
  const ExperimentSpec a = load_experiment_spec(data("fig4_schedule.json"));
  const std::string text = experiment_spec_json(a);
  const ExperimentSpec b = parse_experiment_spec(text);
  CHECK(experiment_spec_json(b) == text);
  CHECK(b.env.schedule.segments.size() == 3);
}

TEST_CASE("delay settings") {
  const ExperimentSpec s =
      parse_experiment_spec(R"({"delay": {"ms": 60, "extero_rate_hz": 20}})");
  CHECK(s.env.delay.proprio_s == doctest::Approx(0.06));
  CHECK(s.env.delay.extero_s == doctest::Approx(0.06));
  CHECK(s.env.delay.extero_update_period == doctest::Approx(0.05));
  const ExperimentSpec split =
      parse_experiment_spec(R"({"delay": {"proprio_ms": 30, "extero_ms": 90}})");
  CHECK(split.env.delay.proprio_s == doctest::Approx(0.03));
  CHECK(split.env.delay.extero_s == doctest::Approx(0.09));
}

TEST_CASE("worlds built from specs") {
  WorldSpec w;
  w.kind = WorldKind::kCorridor;
  CHECK(build_world(w, 1).kind == "corridor");
  w.kind = WorldKind::kNavigation;
  CHECK(build_world(w, 1).map.heights() == build_world(w, 1).map.heights());
  w.kind = WorldKind::kGenerated;
  w.difficulty = 1.0;
  w.arena_size = 20.0;
  CHECK(build_world(w, 1).map.heights() != build_world(w, 2).map.heights());
  w.seed = 9;
  CHECK(build_world(w, 1).map.heights() == build_world(w, 2).map.heights());
}

TEST_CASE("policies built from specs") {
  PolicySpec p;
  p.kind = PolicyKind::kConstant;
  p.constant_speed = 0.35;
  auto policy = build_policy(p);
  std::vector<double> obs(obs_layout::kSize, 0.0);
  VelocityProportionalPolicy reference;
  CHECK(policy->evaluate(obs) == reference.command_for(0.35, 0.0));
  p.kind = PolicyKind::kMlp;
  p.weights = "/nonexistent/weights.cpgw";
  CHECK_THROWS_AS(build_policy(p), LoadError);
}

TEST_CASE("trial seeds are distinct and stable") {
  CHECK(trial_seed(5, 0) == trial_seed(5, 0));
  CHECK(trial_seed(5, 0) != trial_seed(5, 1));
  CHECK(trial_seed(5, 0) != trial_seed(6, 0));
}

TEST_CASE("experiments are deterministic and thread-count independent") {
  ExperimentSpec spec = quick_spec();
  const ExperimentResult a = run_experiment(spec);
  const ExperimentResult b = run_experiment(spec);
  spec.threads = 3;
  const ExperimentResult c = run_experiment(spec);
  CHECK(summary_csv_row(a.summary) == summary_csv_row(b.summary));
  CHECK(summary_csv_row(a.summary) == summary_csv_row(c.summary));
  REQUIRE(a.trials.size() == 2);
  CHECK(a.trials[0].seed == trial_seed(5, 0));
  CHECK(a.summary.trials == 2);
  CHECK(a.summary.success_rate == 1.0);
  CHECK(a.summary.mean_velocity > 0.2);
}

TEST_CASE("written outputs are byte-identical across runs") {
  ExperimentSpec spec = quick_spec();
  spec.trials = 1;
  const fs::path d1 = fresh_dir("out1");
  const fs::path d2 = fresh_dir("out2");
  write_results(d1, spec, {run_experiment(spec)});
  write_results(d2, spec, {run_experiment(spec)});
  for (const char* f : {"summary.csv", "summary.jsonl", "episodes.jsonl",
                        "traces/quick/trace_0000.csv", "traces/quick/trace_0000.jsonl"}) {
    INFO(f);
    REQUIRE(fs::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  const auto csv = lines(slurp(d1 / "summary.csv"));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0].rfind("# schema: cpgloco-summary", 0) == 0);
  std::size_t commas = 0;
  for (char ch : csv[2]) commas += ch == ',' ? 1 : 0;
  CHECK(commas + 1 == summary_columns().size());
  const auto row = nlohmann::json::parse(lines(slurp(d1 / "summary.jsonl")).back());
  CHECK(row["label"] == "quick");
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("summaries append only onto a matching schema") {
  ExperimentSpec spec = quick_spec();
  spec.trials = 1;
  spec.output.traces = false;
  spec.output.append = true;
  const fs::path dir = fresh_dir("append");
  const ExperimentResult r = run_experiment(spec);
  write_results(dir, spec, {r});
  write_results(dir, spec, {r});
  CHECK(lines(slurp(dir / "summary.csv")).size() == 4);
  CHECK(lines(slurp(dir / "summary.jsonl")).size() == 3);

  std::ofstream(dir / "summary.csv") << "# schema: something-else\n";
  CHECK_THROWS_AS(write_results(dir, spec, {r}), IoError);
  fs::remove_all(dir);
}

TEST_CASE("delay sweep produces one row per delay") {
  const ExperimentSpec spec = load_experiment_spec(data("delay_sweep.json"));
  const auto rows = sweep_delay(spec);
  REQUIRE(rows.size() == 4);
  const double expected[] = {0.0, 0.03, 0.06, 0.09};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].summary.proprio_delay_s == doctest::Approx(expected[k]));
    CHECK(rows[k].summary.extero_delay_s == doctest::Approx(expected[k]));
    CHECK(rows[k].summary.trials == 2);
  }
  CHECK(rows[1].summary.label == "flat/delay030ms");
}

TEST_CASE("coupling sweep") {
  ExperimentSpec spec = quick_spec();
  spec.env.initial_phase = InitialPhase::kRandom;
  spec.env.episode.episode_length = 3.0;
  spec.trials = 6;
  spec.threads = 0;
  const auto rows = sweep_coupling(spec);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].summary.coupling_weight == doctest::Approx(kDefaultCouplingWeights[k]));
  }
  SUBCASE("locking residual falls as the coupling grows") {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      INFO("weight " << rows[k].summary.coupling_weight);
      CHECK(rows[k].summary.mean_phase_residual < rows[k - 1].summary.mean_phase_residual);
    }
  }
  SUBCASE("the zero-weight row matches a plain run at zero coupling") {
    ExperimentSpec single = spec;
    single.coupling_weight = 0.0;
    single.env.sim.cpg.coupling_weights = trot_config(0.0).coupling_weights;
    ExperimentResult plain = run_experiment(single);
    plain.summary.label = rows[0].summary.label;
    CHECK(summary_csv_row(plain.summary) == summary_csv_row(rows[0].summary));
  }
}
