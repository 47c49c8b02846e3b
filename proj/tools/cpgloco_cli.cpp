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

// Command-line front end. Uses only the C interface of libcpgloco.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpgloco/cpgloco.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitSpecError = 2;

int report(cpg_status st) {
  std::fprintf(stderr, "cpgloco: %s: %s\n", cpg_status_string(st), cpg_last_error());
  return st == CPG_ERR_SPEC ? kExitSpecError : kExitFailure;
}

struct Overrides {
  std::optional<double> delay_ms;
  std::optional<double> extero_delay_ms;
  std::optional<double> extero_rate_hz;
  std::optional<std::string> policy;
  std::optional<std::string> weights;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool no_traces = false;

  json patch() const {
    json p = json::object();
    if (delay_ms) {
      p["delay"]["proprio_ms"] = *delay_ms;
      p["delay"]["extero_ms"] = *delay_ms;
    }
    if (extero_delay_ms) p["delay"]["extero_ms"] = *extero_delay_ms;
    if (extero_rate_hz) {
      p["delay"]["extero_rate_hz"] = *extero_rate_hz;
      p["delay"]["extero_period_s"] = nullptr;
    }
    if (policy) p["policy"]["kind"] = *policy;
    if (weights) p["policy"]["weights"] = *weights;
    if (trials) p["trials"] = *trials;
    if (seed) p["seed"] = *seed;
    if (threads) p["threads"] = *threads;
    if (no_traces) p["output"]["traces"] = false;
    return p;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--delay-ms", o.delay_ms, "Sensor delay for proprioception and exteroception");
  cmd->add_option("--extero-delay-ms", o.extero_delay_ms, "Exteroceptive delay");
  cmd->add_option("--extero-rate-hz", o.extero_rate_hz, "Height map refresh rate");
  cmd->add_option("--policy", o.policy, "mlp | lstm | constant | vprop");
  cmd->add_option("--weights", o.weights, "Weight file for mlp / lstm policies");
  cmd->add_option("--trials", o.trials, "Number of episodes");
  cmd->add_option("--seed", o.seed, "Experiment seed");
  cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  cmd->add_flag("--no-traces", o.no_traces, "Skip per-episode trace files");
}

int open_experiment(const std::string& spec_path, const Overrides& o, cpg_experiment** exp) {
  cpg_status st = cpg_experiment_load(spec_path.c_str(), exp);
  if (st != CPG_OK) return report(st);
  const json patch = o.patch();
  if (!patch.empty()) {
    st = cpg_experiment_patch(*exp, patch.dump().c_str());
    if (st != CPG_OK) {
      cpg_experiment_destroy(*exp);
      *exp = nullptr;
      return report(st);
    }
  }
  return 0;
}

void print_summary(const cpg_experiment* exp) {
  std::printf("%-32s %7s %8s %8s %7s %8s %8s %8s %7s %8s %9s\n", "label", "w", "delay_s",
              "success", "cot", "v", "freq", "r_x", "omega", "qddot", "residual");
  for (size_t k = 0; k < cpg_experiment_row_count(exp); ++k) {
    cpg_summary_row r;
    if (cpg_experiment_summary(exp, k, &r) != CPG_OK) continue;
    std::printf("%-32s %7.2f %8.3f %8.2f %7.3f %8.3f %8.3f %8.3f %7.3f %8.2f %9.4f\n", r.label,
                r.coupling_weight, r.proprio_delay_s, r.success_rate, r.cost_of_transport,
                r.mean_velocity, r.mean_frequency_hz, r.mean_amplitude_rx,
                r.mean_angular_velocity, r.mean_joint_acceleration, r.mean_phase_residual);
  }
}

int run_mode(const std::string& spec, const Overrides& o, const std::string& out,
             const char* mode, const std::vector<double>& values) {
  cpg_experiment* exp = nullptr;
  if (int rc = open_experiment(spec, o, &exp)) return rc;
  const cpg_status st = cpg_experiment_run(exp, mode, values.empty() ? nullptr : values.data(),
                                           values.size(), out.c_str());
  if (st != CPG_OK) {
    cpg_experiment_destroy(exp);
    return report(st);
  }
  print_summary(exp);
  cpg_experiment_destroy(exp);
  return 0;
}

int write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fputc('\n', stdout);
    return 0;
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    std::fprintf(stderr, "cpgloco: cannot write %s\n", path.c_str());
    return kExitFailure;
  }
  std::fwrite(text.data(), 1, text.size(), f);
  std::fputc('\n', f);
  std::fclose(f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpgloco: CPG quadruped locomotion simulation and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cpg_version()));

  std::string spec_path;
  std::string out_dir;
  Overrides overrides;

  CLI::App* run = app.add_subcommand("run", "Run the episodes of an experiment spec");
  run->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the spec)");
  add_overrides(run, overrides);

  std::vector<double> couplings;
  CLI::App* sweep_c = app.add_subcommand("sweep-coupling", "Repeat an experiment per coupling weight");
  sweep_c->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  sweep_c->add_option("--out", out_dir, "Output directory (overrides the spec)");
  sweep_c->add_option("--coupling", couplings, "Weights, default 0,0.2,0.4,0.6,0.8,1")
      ->delimiter(',');
  add_overrides(sweep_c, overrides);

  std::vector<double> delays_ms;
  CLI::App* sweep_d = app.add_subcommand("sweep-delay", "Repeat an experiment per sensor delay");
  sweep_d->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  sweep_d->add_option("--out", out_dir, "Output directory (overrides the spec)");
  sweep_d->add_option("--delays", delays_ms, "Delays in ms, default 0,30,60,90")->delimiter(',');
  add_overrides(sweep_d, overrides);

  std::string world_out = "-";
  std::string world_kind;
  double world_param = 0.0;
  std::uint64_t world_seed = 0;
  CLI::App* dump_world = app.add_subcommand("dump-world", "Write a world file");
  dump_world->add_option("--spec", spec_path, "Take the world of this experiment spec");
  dump_world->add_option("--kind", world_kind, "flat | corridor | navigation | generated");
  dump_world->add_option("--param", world_param, "Arena size, corridor width or difficulty");
  dump_world->add_option("--seed", world_seed, "World seed");
  dump_world->add_option("--out", world_out, "Destination file")->required();

  std::string schema_out = "-";
  CLI::App* dump_schema = app.add_subcommand("dump-obs-schema", "Print the observation layout");
  dump_schema->add_option("--out", schema_out, "Destination file, default stdout");

  std::string arch = "mlp";
  std::uint64_t weight_seed = 0;
  bool zero = false;
  std::string weights_out;
  CLI::App* make_weights = app.add_subcommand("make-weights", "Write a network weight file");
  make_weights->add_option("--arch", arch, "mlp | lstm")->check(CLI::IsMember({"mlp", "lstm"}));
  make_weights->add_option("--seed", weight_seed, "Initialization seed");
  make_weights->add_flag("--zero", zero, "All-zero weights");
  make_weights->add_option("--out", weights_out, "Destination file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_mode(spec_path, overrides, out_dir, "run", {});
  if (sweep_c->parsed()) return run_mode(spec_path, overrides, out_dir, "sweep-coupling", couplings);
  if (sweep_d->parsed()) {
    std::vector<double> seconds;
    for (double ms : delays_ms) seconds.push_back(ms / 1000.0);
    return run_mode(spec_path, overrides, out_dir, "sweep-delay", seconds);
  }

  if (dump_world->parsed()) {
    if (spec_path.empty() == world_kind.empty()) {
      std::fprintf(stderr, "cpgloco: dump-world needs exactly one of --spec and --kind\n");
      return kExitFailure;
    }
    cpg_status st;
    if (!spec_path.empty()) {
      cpg_experiment* exp = nullptr;
      st = cpg_experiment_load(spec_path.c_str(), &exp);
      if (st == CPG_OK) st = cpg_experiment_dump_world(exp, world_out.c_str());
      cpg_experiment_destroy(exp);
    } else {
      cpg_world* world = nullptr;
      st = cpg_world_create(world_kind.c_str(), world_param, world_seed, &world);
      if (st == CPG_OK) st = cpg_world_save(world, world_out.c_str());
      cpg_world_destroy(world);
    }
    return st == CPG_OK ? 0 : report(st);
  }

  if (dump_schema->parsed()) {
    size_t needed = 0;
    cpg_status st = cpg_observation_schema(nullptr, 0, &needed);
    if (st != CPG_OK) return report(st);
    std::string text(needed, '\0');
    st = cpg_observation_schema(text.data(), text.size(), &needed);
    if (st != CPG_OK) return report(st);
    text.resize(needed - 1);
    return write_text(schema_out, text);
  }

  if (make_weights->parsed()) {
    cpg_policy* policy = nullptr;
    cpg_status st = cpg_policy_create_network(arch.c_str(), weight_seed, zero ? 1 : 0, &policy);
    if (st == CPG_OK) st = cpg_policy_save(policy, weights_out.c_str());
    cpg_policy_destroy(policy);
    return st == CPG_OK ? 0 : report(st);
  }
  return 0;
}
