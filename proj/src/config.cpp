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

#include "cpgloco/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cpgloco {
namespace {

using nlohmann::ordered_json;
using json = nlohmann::json;

// Reads the members of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("must be an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <class T>
  void read(const char* key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(std::string("has an invalid value for '") + key + "'");
    }
  }

  void read_range(const char* key, Range& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(std::string("'") + key + "' must be a [lo, hi] pair");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
    if (out.lo > out.hi) fail(std::string("'") + key + "' has lo > hi");
  }

  void read_legs(const char* key, std::array<double, kNumLegs>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (v.is_number()) {
      out.fill(v.get<double>());
      return;
    }
    if (!v.is_array() || v.size() != kNumLegs) {
      fail(std::string("'") + key + "' must be a number or four numbers");
    }
    for (std::size_t i = 0; i < kNumLegs; ++i) out[i] = v[i].get<double>();
  }

  void read_matrix(const char* key, Matrix4& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != kNumLegs) fail(std::string("'") + key + "' must be 4x4");
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      if (!v[i].is_array() || v[i].size() != kNumLegs) {
        fail(std::string("'") + key + "' must be 4x4");
      }
      for (std::size_t k = 0; k < kNumLegs; ++k) out[i][k] = v[i][k].get<double>();
    }
  }

  Section child(const char* key) { return Section(raw(key), path_ + "." + key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail("has unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw SpecError("spec " + path_ + " " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* initial_phase_name(InitialPhase p) {
  switch (p) {
    case InitialPhase::kPattern:
      return "pattern";
    case InitialPhase::kRandom:
      return "random";
    case InitialPhase::kZero:
      return "zero";
  }
  return "pattern";
}

WorldKind parse_world_kind(const std::string& s) {
  if (s == "flat") return WorldKind::kFlat;
  if (s == "corridor") return WorldKind::kCorridor;
  if (s == "navigation") return WorldKind::kNavigation;
  if (s == "generated") return WorldKind::kGenerated;
  if (s == "file") return WorldKind::kFile;
  throw SpecError("unknown world kind '" + s + "'");
}

PolicyKind parse_policy_kind(const std::string& s) {
  if (s == "mlp") return PolicyKind::kMlp;
  if (s == "lstm") return PolicyKind::kLstm;
  if (s == "constant") return PolicyKind::kConstant;
  if (s == "vprop" || s == "velocity-proportional") return PolicyKind::kVelocityProportional;
  throw SpecError("unknown policy kind '" + s + "'");
}

void read_world(Section s, WorldSpec& w) {
  std::string kind = world_kind_name(w.kind);
  s.read("kind", kind);
  w.kind = parse_world_kind(kind);
  s.read("arena_size", w.arena_size);
  s.read("width", w.corridor_width);
  s.read("length", w.corridor_length);
  s.read("difficulty", w.difficulty);
  if (s.has("seed")) {
    std::uint64_t seed = 0;
    s.read("seed", seed);
    w.seed = seed;
  }
  s.read("per_trial", w.per_trial);
  s.read("path", w.path);
  s.finish();
}

void read_policy(Section s, PolicySpec& p, const GaitShapeParams& gait) {
  std::string kind = policy_kind_name(p.kind);
  s.read("kind", kind);
  p.kind = parse_policy_kind(kind);
  s.read("weights", p.weights);
  s.read_legs("mu_x", p.constant.mu_x);
  s.read_legs("mu_y", p.constant.mu_y);
  s.read_legs("omega_hz", p.constant.omega_hz);
  if (s.has("speed")) {
    double v = 0.0;
    s.read("speed", v);
    p.constant_speed = v;
  }
  p.vprop.d_step = gait.d_step;
  s.read("d_step", p.vprop.d_step);
  s.read("speed_gain", p.vprop.speed_gain);
  if (s.has("squash")) {
    std::string sq;
    s.read("squash", sq);
    p.squash = parse_squash(sq);
  }
  s.finish();
}

void read_delay(Section s, DelayConfig& d) {
  double ms = -1.0;
  s.read("ms", ms);
  if (ms >= 0.0) d.proprio_s = d.extero_s = ms / 1000.0;
  double proprio_ms = d.proprio_s * 1000.0;
  double extero_ms = d.extero_s * 1000.0;
  s.read("proprio_ms", proprio_ms);
  s.read("extero_ms", extero_ms);
  d.proprio_s = proprio_ms / 1000.0;
  d.extero_s = extero_ms / 1000.0;
  if (s.has("extero_rate_hz")) {
    double hz = 0.0;
    s.read("extero_rate_hz", hz);
    if (!(hz > 0.0)) s.fail("'extero_rate_hz' must be positive");
    d.extero_update_period = 1.0 / hz;
  }
  s.read("extero_period_s", d.extero_update_period);
  s.finish();
}

void read_cpg(Section s, ExperimentSpec& spec) {
  CpgNetworkConfig& c = spec.env.sim.cpg;
  s.read("coupling_weight", spec.coupling_weight);
  if (spec.coupling_weight < 0.0 || spec.coupling_weight > 1.0) {
    s.fail("'coupling_weight' must lie in [0, 1]");
  }
  const CpgNetworkConfig trot = trot_config(spec.coupling_weight);
  c.coupling_weights = trot.coupling_weights;
  c.phase_biases = trot.phase_biases;
  double a = -1.0;
  s.read("a", a);
  if (a >= 0.0) c.a_x = c.a_y = a;
  s.read("a_x", c.a_x);
  s.read("a_y", c.a_y);
  s.read("dt", c.dt);
  s.read_matrix("w", c.coupling_weights);
  s.read_matrix("phi", c.phase_biases);
  std::string integ = c.amplitude_integrator == AmplitudeIntegrator::kExact ? "exact" : "euler";
  s.read("amplitude_integrator", integ);
  if (integ == "exact") {
    c.amplitude_integrator = AmplitudeIntegrator::kExact;
  } else if (integ == "euler") {
    c.amplitude_integrator = AmplitudeIntegrator::kEuler;
  } else {
    s.fail("'amplitude_integrator' must be exact or euler");
  }
  std::string phase = initial_phase_name(spec.env.initial_phase);
  s.read("initial_phase", phase);
  if (phase == "pattern") {
    spec.env.initial_phase = InitialPhase::kPattern;
  } else if (phase == "random") {
    spec.env.initial_phase = InitialPhase::kRandom;
  } else if (phase == "zero") {
    spec.env.initial_phase = InitialPhase::kZero;
  } else {
    s.fail("'initial_phase' must be pattern, random or zero");
  }
  s.finish();
}

void read_gait(Section s, GaitShapeParams& g) {
  s.read("d_step", g.d_step);
  s.read("h", g.h);
  s.read("g_c", g.g_c);
  s.read("g_p", g.g_p);
  s.read("mu_min", g.mu_min);
  s.read("mu_max", g.mu_max);
  s.finish();
}

void read_control(Section s, SimParams& p) {
  s.read("kp", p.dynamics.gains.kp);
  s.read("kd", p.dynamics.gains.kd);
  s.read("tau_max", p.tau_max);
  s.read("joint_inertia", p.joint_inertia);
  double hip = p.legs[0].hip_offset, l1 = p.legs[0].l_thigh, l2 = p.legs[0].l_calf;
  s.read("hip_offset", hip);
  s.read("l_thigh", l1);
  s.read("l_calf", l2);
  for (LegGeometry& leg : p.legs) {
    leg.hip_offset = hip;
    leg.l_thigh = l1;
    leg.l_calf = l2;
  }
  std::string power = p.power_mode == PowerMode::kPerJointAbs ? "per_joint_abs" : "abs_of_sum";
  s.read("power_mode", power);
  if (power == "per_joint_abs") {
    p.power_mode = PowerMode::kPerJointAbs;
  } else if (power == "abs_of_sum") {
    p.power_mode = PowerMode::kAbsOfSum;
  } else {
    s.fail("'power_mode' must be per_joint_abs or abs_of_sum");
  }
  s.finish();
}

void read_sim(Section s, SimParams& p) {
  s.read("nominal_mass", p.nominal_mass);
  s.read("mass_scale", p.dynamics.mass_scale);
  s.read("added_mass", p.dynamics.added_mass);
  s.read("friction", p.dynamics.friction);
  s.read("contact_tolerance", p.contact_tolerance);
  s.read("slip_speed_per_friction", p.slip_speed_per_friction);
  s.read("push_decay_time", p.push_decay_time);
  s.read("max_step_height", p.max_step_height);
  s.finish();
}

void read_episode(Section s, EpisodeConfig& e) {
  s.read("length", e.episode_length);
  s.read_range("cmd_vx", e.cmd_vx);
  s.read_range("cmd_vy", e.cmd_vy);
  s.read_range("cmd_wz", e.cmd_wz);
  s.read("resample_period", e.command_resample_period);
  s.read("push_enabled", e.push_enabled);
  s.read("push_magnitude", e.push_magnitude);
  s.read("push_period", e.push_period);
  s.read("randomize_dynamics", e.randomize_dynamics);
  s.read_range("mass_scale", e.mass_scale);
  s.read_range("added_mass", e.added_mass);
  s.read_range("friction", e.friction);
  s.read_range("kp", e.kp);
  s.read_range("kd", e.kd);
  s.read("randomize_gait", e.randomize_gait);
  s.read_range("h_range", e.h_range);
  s.read_range("gc_range", e.gc_range);
  s.read_range("gp_range", e.gp_range);
  s.read("extero_noise_std", e.extero_noise_std);
  s.finish();
}

void read_grid(Section s, HeightGridOptions& g) {
  s.read("rows", g.rows);
  s.read("cols", g.cols);
  s.read("spacing", g.spacing);
  s.read("forward_offset", g.forward_offset);
  s.read("nominal_height", g.nominal_height);
  s.finish();
}

void read_reward(Section s, RewardWeights& r) {
  s.read("dt", r.dt);
  s.read("track_vx", r.track_vx);
  s.read("track_vy", r.track_vy);
  s.read("track_wz", r.track_wz);
  s.read("vz", r.vz);
  s.read("wxy", r.wxy);
  s.read("power", r.power);
  s.read("kernel_width", r.kernel_width);
  s.finish();
}

VelocityCommand read_velocity(Section& s, VelocityCommand v) {
  s.read("vx", v.vx);
  s.read("vy", v.vy);
  s.read("wz", v.wz);
  return v;
}

void read_commands(Section s, EnvironmentConfig& env) {
  std::string mode = env.command_mode == CommandMode::kRandom ? "random" : "schedule";
  s.read("mode", mode);
  if (mode == "schedule") {
    env.command_mode = CommandMode::kSchedule;
  } else if (mode == "random") {
    env.command_mode = CommandMode::kRandom;
  } else {
    s.fail("'mode' must be schedule or random");
  }
  env.schedule.base = read_velocity(s, env.schedule.base);
  if (s.has("segments")) {
    const json& segs = s.raw("segments");
    if (!segs.is_array()) s.fail("'segments' must be an array");
    env.schedule.segments.clear();
    for (std::size_t k = 0; k < segs.size(); ++k) {
      Section seg(segs[k], "commands.segments[" + std::to_string(k) + "]");
      CommandSegment c;
      seg.read("from", c.t_begin);
      seg.read("to", c.t_end);
      c.command = read_velocity(seg, {});
      seg.finish();
      if (c.t_end < c.t_begin) seg.fail("ends before it begins");
      env.schedule.segments.push_back(c);
    }
  }
  s.finish();
}

void read_output(Section s, OutputSpec& o) {
  s.read("dir", o.dir);
  s.read("traces", o.traces);
  s.read("csv", o.csv);
  s.read("jsonl", o.jsonl);
  s.read("append", o.append);
  s.finish();
}

ordered_json range_json(const Range& r) { return ordered_json::array({r.lo, r.hi}); }

ordered_json legs_json(const std::array<double, kNumLegs>& a) {
  return ordered_json::array({a[0], a[1], a[2], a[3]});
}

ordered_json matrix_json(const Matrix4& m) {
  ordered_json out = ordered_json::array();
  for (const auto& row : m) out.push_back(legs_json(row));
  return out;
}


}  // namespace

const char* world_kind_name(WorldKind k) {
  switch (k) {
    case WorldKind::kFlat:
      return "flat";
    case WorldKind::kCorridor:
      return "corridor";
    case WorldKind::kNavigation:
      return "navigation";
    case WorldKind::kGenerated:
      return "generated";
    case WorldKind::kFile:
      return "file";
  }
  return "flat";
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw SpecError("trial count must be at least 1");
  if (threads < 0) throw SpecError("thread count must be non-negative");
  if (world.kind == WorldKind::kFile && world.path.empty()) {
    throw SpecError("file world needs a path");
  }
  if ((policy.kind == PolicyKind::kMlp || policy.kind == PolicyKind::kLstm) &&
      policy.weights.empty()) {
    throw SpecError(std::string(policy_kind_name(policy.kind)) + " policy needs a weight file");
  }
  if (world.kind == WorldKind::kGenerated && !(world.difficulty >= 0.0 && world.difficulty <= 1.0)) {
    throw SpecError("terrain difficulty must lie in [0, 1]");
  }
  try {
    env.validate();
    policy.constant.clamped();
  } catch (const Error& e) {
    throw SpecError(std::string("invalid experiment spec: ") + e.what());
  }
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("experiment spec is not valid JSON: ") + e.what());
  }
  ExperimentSpec spec;
  spec.env.episode.randomize_dynamics = false;
  Section root(doc, "$");
  root.read("label", spec.label);
  root.read("trials", spec.trials);
  root.read("seed", spec.seed);
  root.read("threads", spec.threads);
  // Gait first: the policy section defaults its step length to the gait's.
  if (root.has("gait")) read_gait(root.child("gait"), spec.env.sim.gait);
  if (root.has("cpg")) {
    read_cpg(root.child("cpg"), spec);
  } else {
    spec.env.sim.cpg = trot_config(spec.coupling_weight);
  }
  if (root.has("world")) read_world(root.child("world"), spec.world);
  spec.policy.vprop.d_step = spec.env.sim.gait.d_step;
  if (root.has("policy")) read_policy(root.child("policy"), spec.policy, spec.env.sim.gait);
  if (root.has("delay")) read_delay(root.child("delay"), spec.env.delay);
  if (root.has("control")) read_control(root.child("control"), spec.env.sim);
  if (root.has("sim")) read_sim(root.child("sim"), spec.env.sim);
  if (root.has("episode")) read_episode(root.child("episode"), spec.env.episode);
  if (root.has("grid")) read_grid(root.child("grid"), spec.env.grid);
  if (root.has("reward")) read_reward(root.child("reward"), spec.env.reward);
  if (root.has("commands")) read_commands(root.child("commands"), spec.env);
  if (root.has("output")) read_output(root.child("output"), spec.output);
  root.finish();
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open experiment spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_spec(ss.str());
}

std::string experiment_spec_json(const ExperimentSpec& spec) {
  const SimParams& sim = spec.env.sim;
  const EpisodeConfig& ep = spec.env.episode;
  ordered_json j;
  j["label"] = spec.label;
  j["trials"] = spec.trials;
  j["seed"] = spec.seed;
  j["threads"] = spec.threads;

  ordered_json world;
  world["kind"] = world_kind_name(spec.world.kind);
  world["arena_size"] = spec.world.arena_size;
  world["width"] = spec.world.corridor_width;
  world["length"] = spec.world.corridor_length;
  world["difficulty"] = spec.world.difficulty;
  if (spec.world.seed) world["seed"] = *spec.world.seed;
  world["per_trial"] = spec.world.per_trial;
  if (!spec.world.path.empty()) world["path"] = spec.world.path;
  j["world"] = world;

  ordered_json policy;
  policy["kind"] = policy_kind_name(spec.policy.kind);
  if (!spec.policy.weights.empty()) policy["weights"] = spec.policy.weights;
  policy["mu_x"] = legs_json(spec.policy.constant.mu_x);
  policy["mu_y"] = legs_json(spec.policy.constant.mu_y);
  policy["omega_hz"] = legs_json(spec.policy.constant.omega_hz);
  if (spec.policy.constant_speed) policy["speed"] = *spec.policy.constant_speed;
  policy["d_step"] = spec.policy.vprop.d_step;
  policy["speed_gain"] = spec.policy.vprop.speed_gain;
  if (spec.policy.squash) policy["squash"] = squash_name(*spec.policy.squash);
  j["policy"] = policy;

  j["delay"] = {{"proprio_ms", spec.env.delay.proprio_s * 1000.0},
                {"extero_ms", spec.env.delay.extero_s * 1000.0},
                {"extero_period_s", spec.env.delay.extero_update_period}};
  j["cpg"] = {{"coupling_weight", spec.coupling_weight},
              {"a_x", sim.cpg.a_x},
              {"a_y", sim.cpg.a_y},
              {"dt", sim.cpg.dt},
              {"amplitude_integrator",
               sim.cpg.amplitude_integrator == AmplitudeIntegrator::kExact ? "exact" : "euler"},
              {"w", matrix_json(sim.cpg.coupling_weights)},
              {"phi", matrix_json(sim.cpg.phase_biases)},
              {"initial_phase", initial_phase_name(spec.env.initial_phase)}};
  j["gait"] = {{"d_step", sim.gait.d_step}, {"h", sim.gait.h},         {"g_c", sim.gait.g_c},
               {"g_p", sim.gait.g_p},       {"mu_min", sim.gait.mu_min}, {"mu_max", sim.gait.mu_max}};
  j["control"] = {{"kp", sim.dynamics.gains.kp},
                  {"kd", sim.dynamics.gains.kd},
                  {"tau_max", sim.tau_max},
                  {"joint_inertia", sim.joint_inertia},
                  {"hip_offset", sim.legs[0].hip_offset},
                  {"l_thigh", sim.legs[0].l_thigh},
                  {"l_calf", sim.legs[0].l_calf},
                  {"power_mode",
                   sim.power_mode == PowerMode::kPerJointAbs ? "per_joint_abs" : "abs_of_sum"}};
  j["sim"] = {{"nominal_mass", sim.nominal_mass},
              {"mass_scale", sim.dynamics.mass_scale},
              {"added_mass", sim.dynamics.added_mass},
              {"friction", sim.dynamics.friction},
              {"contact_tolerance", sim.contact_tolerance},
              {"slip_speed_per_friction", sim.slip_speed_per_friction},
              {"push_decay_time", sim.push_decay_time},
              {"max_step_height", sim.max_step_height}};
  j["episode"] = {{"length", ep.episode_length},
                  {"cmd_vx", range_json(ep.cmd_vx)},
                  {"cmd_vy", range_json(ep.cmd_vy)},
                  {"cmd_wz", range_json(ep.cmd_wz)},
                  {"resample_period", ep.command_resample_period},
                  {"push_enabled", ep.push_enabled},
                  {"push_magnitude", ep.push_magnitude},
                  {"push_period", ep.push_period},
                  {"randomize_dynamics", ep.randomize_dynamics},
                  {"mass_scale", range_json(ep.mass_scale)},
                  {"added_mass", range_json(ep.added_mass)},
                  {"friction", range_json(ep.friction)},
                  {"kp", range_json(ep.kp)},
                  {"kd", range_json(ep.kd)},
                  {"randomize_gait", ep.randomize_gait},
                  {"h_range", range_json(ep.h_range)},
                  {"gc_range", range_json(ep.gc_range)},
                  {"gp_range", range_json(ep.gp_range)},
                  {"extero_noise_std", ep.extero_noise_std}};
  const HeightGridOptions& g = spec.env.grid;
  j["grid"] = {{"rows", g.rows},
               {"cols", g.cols},
               {"spacing", g.spacing},
               {"forward_offset", g.forward_offset},
               {"nominal_height", g.nominal_height}};
  const RewardWeights& r = spec.env.reward;
  j["reward"] = {{"dt", r.dt},       {"track_vx", r.track_vx}, {"track_vy", r.track_vy},
                 {"track_wz", r.track_wz}, {"vz", r.vz},       {"wxy", r.wxy},
                 {"power", r.power}, {"kernel_width", r.kernel_width}};
  ordered_json commands;
  commands["mode"] = spec.env.command_mode == CommandMode::kRandom ? "random" : "schedule";
  commands["vx"] = spec.env.schedule.base.vx;
  commands["vy"] = spec.env.schedule.base.vy;
  commands["wz"] = spec.env.schedule.base.wz;
  ordered_json segs = ordered_json::array();
  for (const CommandSegment& s : spec.env.schedule.segments) {
    segs.push_back({{"from", s.t_begin},
                    {"to", s.t_end},
                    {"vx", s.command.vx},
                    {"vy", s.command.vy},
                    {"wz", s.command.wz}});
  }
  commands["segments"] = segs;
  j["commands"] = commands;
  j["output"] = {{"dir", spec.output.dir},
                 {"traces", spec.output.traces},
                 {"csv", spec.output.csv},
                 {"jsonl", spec.output.jsonl},
                 {"append", spec.output.append}};
  return j.dump(2);
}

World build_world(const WorldSpec& spec, std::uint64_t trial_seed) {
  const std::uint64_t seed = spec.seed.value_or(trial_seed);
  switch (spec.kind) {
    case WorldKind::kFlat:
      return flat_world(spec.arena_size);
    case WorldKind::kCorridor: {
      CorridorOptions opt;
      opt.length = spec.corridor_length;
      return corridor_world(spec.corridor_width, opt);
    }
    case WorldKind::kNavigation:
      return navigation_world(seed);
    case WorldKind::kGenerated:
      return generate_terrain(seed, spec.difficulty, spec.arena_size);
    case WorldKind::kFile:
      return World::load(spec.path);
  }
  throw SpecError("unknown world kind");
}

std::unique_ptr<Policy> build_policy(const PolicySpec& spec) {
  std::unique_ptr<Policy> policy;
  switch (spec.kind) {
    case PolicyKind::kMlp:
    case PolicyKind::kLstm:
      policy = load_policy(spec.weights, spec.kind);
      if (policy->input_size() != obs_layout::kSize) {
        throw SpecError("policy input size " + std::to_string(policy->input_size()) +
                        " does not match the observation size " +
                        std::to_string(obs_layout::kSize));
      }
      break;
    case PolicyKind::kConstant:
      if (spec.constant_speed) {
        VelocityProportionalPolicy vp(spec.vprop);
        policy = std::make_unique<ConstantPolicy>(vp.command_for(*spec.constant_speed, 0.0));
      } else {
        policy = std::make_unique<ConstantPolicy>(spec.constant);
      }
      break;
    case PolicyKind::kVelocityProportional:
      policy = std::make_unique<VelocityProportionalPolicy>(spec.vprop);
      break;
  }
  if (spec.squash) {
    ActionScaler s = policy->scaler();
    s.squash = *spec.squash;
    policy->set_scaler(s);
  }
  return policy;
}

}  // namespace cpgloco
