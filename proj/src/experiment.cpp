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

#include "cpgloco/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace cpgloco {
namespace {

using nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string file_safe(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "run" : out;
}

std::string summary_schema_line() {
  return "# schema: cpgloco-summary v" + std::to_string(kSummarySchemaVersion);
}

std::string summary_header_line() {
  std::string line;
  for (const std::string& c : summary_columns()) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line;
}

std::string summary_json_schema() {
  ordered_json j;
  j["schema"] = "cpgloco-summary";
  j["version"] = kSummarySchemaVersion;
  j["columns"] = summary_columns();
  return j.dump();
}

std::ofstream open_output(const std::filesystem::path& path, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// Opens `path` for appending when its opening lines match `header`, otherwise
// writes a fresh file starting with `header`.
std::ofstream open_with_header(const std::filesystem::path& path,
                               const std::vector<std::string>& header, bool append) {
  if (append && std::filesystem::exists(path)) {
    std::ifstream in(path);
    for (const std::string& expected : header) {
      std::string line;
      if (!std::getline(in, line) || line != expected) {
        throw IoError("existing " + path.string() + " has a different schema; cannot append");
      }
    }
    return open_output(path, true);
  }
  std::ofstream out = open_output(path, false);
  for (const std::string& line : header) out << line << '\n';
  return out;
}

ordered_json metrics_json(const EpisodeMetrics& m) {
  ordered_json j;
  j["cost_of_transport"] = m.cot_defined ? ordered_json(m.cost_of_transport) : ordered_json();
  j["mean_velocity"] = m.mean_velocity;
  j["mean_frequency_hz"] = m.mean_frequency_hz;
  j["mean_amplitude_rx"] = m.mean_amplitude_rx;
  j["mean_angular_velocity"] = m.mean_angular_velocity;
  j["mean_joint_acceleration"] = m.mean_joint_acceleration;
  j["mean_power"] = m.mean_power;
  j["mean_phase_residual"] = m.mean_phase_residual;
  j["total_reward"] = m.total_reward;
  j["duration"] = m.duration;
  j["mass"] = m.mass;
  j["collided"] = m.collided;
  j["completed"] = m.completed;
  j["success"] = m.success;
  return j;
}

std::vector<std::string> trace_columns() {
  std::vector<std::string> c = {"t",  "cmd_vx", "cmd_vy", "cmd_wz", "x",  "y",  "z",
                                "roll", "pitch", "yaw",  "vx",     "vy", "vz", "wx",
                                "wy", "wz"};
  for (std::size_t k = 0; k < kNumJoints; ++k) c.push_back("q" + std::to_string(k));
  for (std::size_t k = 0; k < kNumJoints; ++k) c.push_back("qdot" + std::to_string(k));
  for (std::size_t k = 0; k < kNumLegs; ++k) c.push_back("contact" + std::to_string(k));
  c.push_back("power");
  c.push_back("energy");
  for (const char* v : {"r_x", "rdot_x", "r_y", "rdot_y", "theta", "theta_dot"}) {
    for (std::size_t k = 0; k < kNumLegs; ++k) c.push_back(std::string(v) + std::to_string(k));
  }
  for (const char* v : {"mu_x", "mu_y", "omega_hz"}) {
    for (std::size_t k = 0; k < kNumLegs; ++k) c.push_back(std::string(v) + std::to_string(k));
  }
  for (const char* v : {"r_track_vx", "r_track_vy", "r_track_wz", "r_vz", "r_wxy", "r_power",
                        "reward"}) {
    c.push_back(v);
  }
  return c;
}

std::vector<double> trace_values(const StepRecord& s) {
  const RobotState& r = s.robot;
  std::vector<double> v = {s.t,       s.commands.vx, s.commands.vy, s.commands.wz, r.position.x,
                           r.position.y, r.position.z, r.roll,    r.pitch,      r.yaw,
                           r.lin_vel.x, r.lin_vel.y,  r.lin_vel.z, r.ang_vel.x,  r.ang_vel.y,
                           r.ang_vel.z};
  v.insert(v.end(), r.q.begin(), r.q.end());
  v.insert(v.end(), r.qdot.begin(), r.qdot.end());
  for (bool c : r.contacts) v.push_back(c ? 1.0 : 0.0);
  v.push_back(r.power);
  v.push_back(r.energy);
  for (int f = 0; f < 6; ++f) {
    for (const OscillatorState& o : s.cpg.legs) {
      const double vals[] = {o.r_x, o.rdot_x, o.r_y, o.rdot_y, o.theta, o.theta_dot};
      v.push_back(vals[f]);
    }
  }
  v.insert(v.end(), s.action.mu_x.begin(), s.action.mu_x.end());
  v.insert(v.end(), s.action.mu_y.begin(), s.action.mu_y.end());
  v.insert(v.end(), s.action.omega_hz.begin(), s.action.omega_hz.end());
  const RewardTerms& w = s.reward;
  for (double x : {w.track_vx, w.track_vy, w.track_wz, w.penalty_vz, w.penalty_wxy,
                   w.penalty_power, w.total}) {
    v.push_back(x);
  }
  return v;
}

ExperimentSpec with_coupling(const ExperimentSpec& base, double w) {
  ExperimentSpec s = base;
  s.coupling_weight = w;
  const CpgNetworkConfig trot = trot_config(w);
  s.env.sim.cpg.coupling_weights = trot.coupling_weights;
  s.env.sim.cpg.phase_biases = trot.phase_biases;
  return s;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, int index) {
  return splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(index));
}

SummaryRow summarize(const std::string& label, const ExperimentSpec& spec,
                     const std::vector<TrialResult>& trials) {
  SummaryRow row;
  row.label = label;
  row.coupling_weight = spec.coupling_weight;
  row.proprio_delay_s = spec.env.delay.proprio_s;
  row.extero_delay_s = spec.env.delay.extero_s;
  row.trials = static_cast<int>(trials.size());
  if (trials.empty()) return row;
  for (const TrialResult& t : trials) {
    const EpisodeMetrics& m = t.metrics;
    row.success_rate += m.success ? 1.0 : 0.0;
    if (m.cot_defined) {
      row.cost_of_transport += m.cost_of_transport;
      ++row.cot_trials;
    }
    row.mean_velocity += m.mean_velocity;
    row.mean_frequency_hz += m.mean_frequency_hz;
    row.mean_amplitude_rx += m.mean_amplitude_rx;
    row.mean_angular_velocity += m.mean_angular_velocity;
    row.mean_joint_acceleration += m.mean_joint_acceleration;
    row.mean_phase_residual += m.mean_phase_residual;
    row.mean_reward += m.total_reward;
    row.mean_duration += m.duration;
  }
  const double n = static_cast<double>(trials.size());
  row.success_rate /= n;
  if (row.cot_trials > 0) row.cost_of_transport /= row.cot_trials;
  row.mean_velocity /= n;
  row.mean_frequency_hz /= n;
  row.mean_amplitude_rx /= n;
  row.mean_angular_velocity /= n;
  row.mean_joint_acceleration /= n;
  row.mean_phase_residual /= n;
  row.mean_reward /= n;
  row.mean_duration /= n;
  return row;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  // Resolve every reference before running anything.
  const std::unique_ptr<Policy> prototype = build_policy(spec.policy);
  std::shared_ptr<const World> shared_world;
  if (!spec.world.per_trial) {
    shared_world = std::make_shared<const World>(build_world(spec.world, spec.seed));
  }
  // Constructing once checks the environment configuration up front.
  Environment probe(shared_world ? shared_world
                                 : std::make_shared<const World>(build_world(spec.world, spec.seed)),
                    spec.env);

  const int n = spec.trials;
  std::vector<TrialResult> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        TrialResult& r = results[static_cast<std::size_t>(i)];
        r.index = i;
        r.seed = trial_seed(spec.seed, i);
        auto world = shared_world ? shared_world
                                  : std::make_shared<const World>(build_world(spec.world, r.seed));
        Environment env(world, spec.env);
        env.set_record_trace(spec.output.traces);
        std::unique_ptr<Policy> policy = prototype->clone();
        r.metrics = env.rollout(*policy, r.seed);
        r.termination = env.termination();
        if (spec.output.traces) r.trace = env.trace();
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };

  int threads = spec.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency())
                                  : spec.threads;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult out;
  out.summary = summarize(spec.label, spec, results);
  out.trials = std::move(results);
  return out;
}

std::vector<ExperimentResult> sweep_coupling(const ExperimentSpec& spec,
                                             const std::vector<double>& weights) {
  if (weights.empty()) throw SpecError("coupling sweep needs at least one weight");
  std::vector<ExperimentSpec> specs;
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) throw SpecError("coupling weight " + num(w) + " outside [0, 1]");
    ExperimentSpec s = with_coupling(spec, w);
    s.label = spec.label + "/w" + num(w);
    s.validate();
    specs.push_back(std::move(s));
  }
  std::vector<ExperimentResult> out;
  for (const ExperimentSpec& s : specs) out.push_back(run_experiment(s));
  return out;
}

std::vector<ExperimentResult> sweep_delay(const ExperimentSpec& spec,
                                          const std::vector<double>& delays_s) {
  if (delays_s.empty()) throw SpecError("delay sweep needs at least one delay");
  std::vector<ExperimentSpec> specs;
  for (double d : delays_s) {
    ExperimentSpec s = spec;
    s.env.delay.proprio_s = d;
    s.env.delay.extero_s = d;
    char ms[16];
    std::snprintf(ms, sizeof(ms), "%03lld", static_cast<long long>(std::llround(d * 1000.0)));
    s.label = spec.label + "/delay" + ms + "ms";
    s.validate();
    specs.push_back(std::move(s));
  }
  std::vector<ExperimentResult> out;
  for (const ExperimentSpec& s : specs) out.push_back(run_experiment(s));
  return out;
}

std::vector<std::string> summary_columns() {
  return {"label",
          "coupling_weight",
          "proprio_delay_s",
          "extero_delay_s",
          "trials",
          "success_rate",
          "cost_of_transport",
          "cot_trials",
          "mean_velocity",
          "mean_frequency_hz",
          "mean_amplitude_rx",
          "mean_angular_velocity",
          "mean_joint_acceleration",
          "mean_phase_residual",
          "mean_reward",
          "mean_duration"};
}

std::string summary_csv_row(const SummaryRow& r) {
  std::string label = r.label;
  if (label.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : label) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    label = quoted + "\"";
  }
  std::string line = label;
  for (double v : {r.coupling_weight, r.proprio_delay_s, r.extero_delay_s,
                   static_cast<double>(r.trials), r.success_rate, r.cost_of_transport,
                   static_cast<double>(r.cot_trials), r.mean_velocity, r.mean_frequency_hz,
                   r.mean_amplitude_rx, r.mean_angular_velocity, r.mean_joint_acceleration,
                   r.mean_phase_residual, r.mean_reward, r.mean_duration}) {
    line += ',';
    line += num(v);
  }
  return line;
}

std::string summary_json_row(const SummaryRow& r) {
  ordered_json j;
  j["label"] = r.label;
  j["coupling_weight"] = r.coupling_weight;
  j["proprio_delay_s"] = r.proprio_delay_s;
  j["extero_delay_s"] = r.extero_delay_s;
  j["trials"] = r.trials;
  j["success_rate"] = r.success_rate;
  j["cost_of_transport"] = r.cot_trials > 0 ? ordered_json(r.cost_of_transport) : ordered_json();
  j["cot_trials"] = r.cot_trials;
  j["mean_velocity"] = r.mean_velocity;
  j["mean_frequency_hz"] = r.mean_frequency_hz;
  j["mean_amplitude_rx"] = r.mean_amplitude_rx;
  j["mean_angular_velocity"] = r.mean_angular_velocity;
  j["mean_joint_acceleration"] = r.mean_joint_acceleration;
  j["mean_phase_residual"] = r.mean_phase_residual;
  j["mean_reward"] = r.mean_reward;
  j["mean_duration"] = r.mean_duration;
  return j.dump();
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<StepRecord>& trace) {
  std::ofstream out = open_output(path, false);
  out << "# schema: cpgloco-trace v1\n";
  const auto cols = trace_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const StepRecord& s : trace) {
    const auto v = trace_values(s);
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << num(v[k]);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_trace_jsonl(const std::filesystem::path& path, const std::vector<StepRecord>& trace) {
  std::ofstream out = open_output(path, false);
  const auto cols = trace_columns();
  ordered_json header;
  header["schema"] = "cpgloco-trace";
  header["version"] = 1;
  header["columns"] = cols;
  out << header.dump() << '\n';
  for (const StepRecord& s : trace) {
    const auto v = trace_values(s);
    ordered_json row;
    for (std::size_t k = 0; k < v.size(); ++k) row[cols[k]] = v[k];
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_results(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const std::vector<ExperimentResult>& results) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  const bool append = spec.output.append;

  if (spec.output.csv) {
    std::ofstream out = open_with_header(dir / "summary.csv",
                                         {summary_schema_line(), summary_header_line()}, append);
    for (const ExperimentResult& r : results) out << summary_csv_row(r.summary) << '\n';
    if (!out) throw IoError("failed writing summary.csv");
  }
  if (spec.output.jsonl) {
    std::ofstream out = open_with_header(dir / "summary.jsonl", {summary_json_schema()}, append);
    for (const ExperimentResult& r : results) out << summary_json_row(r.summary) << '\n';
    if (!out) throw IoError("failed writing summary.jsonl");
  }

  ordered_json ep_header;
  ep_header["schema"] = "cpgloco-episodes";
  ep_header["version"] = 1;
  std::ofstream episodes = open_with_header(dir / "episodes.jsonl", {ep_header.dump()}, append);
  for (const ExperimentResult& r : results) {
    for (const TrialResult& t : r.trials) {
      ordered_json j;
      j["label"] = r.summary.label;
      j["trial"] = t.index;
      j["seed"] = t.seed;
      j["termination"] = termination_name(t.termination);
      j["metrics"] = metrics_json(t.metrics);
      episodes << j.dump() << '\n';
    }
  }
  if (!episodes) throw IoError("failed writing episodes.jsonl");

  if (!spec.output.traces) return;
  for (const ExperimentResult& r : results) {
    const std::filesystem::path tdir = dir / "traces" / file_safe(r.summary.label);
    std::filesystem::create_directories(tdir, ec);
    if (ec) throw IoError("cannot create trace directory " + tdir.string());
    for (const TrialResult& t : r.trials) {
      char name[32];
      std::snprintf(name, sizeof(name), "trace_%04d", t.index);
      if (spec.output.csv) write_trace_csv(tdir / (std::string(name) + ".csv"), t.trace);
      if (spec.output.jsonl) write_trace_jsonl(tdir / (std::string(name) + ".jsonl"), t.trace);
    }
  }
}

}  // namespace cpgloco
