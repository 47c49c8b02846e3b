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

#include "cpgloco/cpgloco.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <new>
#include <string>

#include "cpgloco/config.hpp"
#include "cpgloco/environment.hpp"
#include "cpgloco/experiment.hpp"
#include "cpgloco/leg_control.hpp"
#include "cpgloco/observation.hpp"
#include "cpgloco/policy.hpp"
#include "cpgloco/terrain.hpp"
#include "json.hpp"

struct cpg_network {
  cpgloco::CpgNetworkConfig config;
  cpgloco::CpgState state;
};

struct cpg_world {
  std::shared_ptr<const cpgloco::World> world;
};

struct cpg_policy {
  std::unique_ptr<cpgloco::Policy> policy;
};

struct cpg_env {
  std::unique_ptr<cpgloco::Environment> env;
};

struct cpg_experiment {
  nlohmann::json doc;
  cpgloco::ExperimentSpec spec;
  std::vector<cpgloco::ExperimentResult> results;
};

namespace {

thread_local std::string g_last_error;

cpg_status fail(cpg_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

cpg_status status_of(cpgloco::ErrorCode code) {
  switch (code) {
    case cpgloco::ErrorCode::kInvalidArgument:
      return CPG_ERR_INVALID_ARGUMENT;
    case cpgloco::ErrorCode::kRange:
      return CPG_ERR_RANGE;
    case cpgloco::ErrorCode::kStateCorruption:
      return CPG_ERR_STATE_CORRUPTION;
    case cpgloco::ErrorCode::kWorkspace:
      return CPG_ERR_WORKSPACE;
    case cpgloco::ErrorCode::kLayout:
      return CPG_ERR_LAYOUT;
    case cpgloco::ErrorCode::kLoad:
      return CPG_ERR_LOAD;
    case cpgloco::ErrorCode::kSpec:
      return CPG_ERR_SPEC;
    case cpgloco::ErrorCode::kIo:
      return CPG_ERR_IO;
  }
  return CPG_ERR_INTERNAL;
}

// Runs `fn` and converts any exception into a status code.
template <class F>
cpg_status guarded(F&& fn) {
  try {
    fn();
    return CPG_OK;
  } catch (const cpgloco::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CPG_ERR_SPEC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CPG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CPG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CPG_ERR_INTERNAL, "unknown error");
  }
}

#define CPG_REQUIRE(cond, what) \
  do {                          \
    if (!(cond)) return fail(CPG_ERR_INVALID_ARGUMENT, what); \
  } while (0)

cpgloco::ModulationCommand to_cpp(const cpg_modulation& m) {
  cpgloco::ModulationCommand c;
  for (std::size_t i = 0; i < cpgloco::kNumLegs; ++i) {
    c.mu_x[i] = m.mu_x[i];
    c.mu_y[i] = m.mu_y[i];
    c.omega_hz[i] = m.omega_hz[i];
  }
  return c;
}

cpg_modulation to_c(const cpgloco::ModulationCommand& c) {
  cpg_modulation m;
  for (std::size_t i = 0; i < cpgloco::kNumLegs; ++i) {
    m.mu_x[i] = c.mu_x[i];
    m.mu_y[i] = c.mu_y[i];
    m.omega_hz[i] = c.omega_hz[i];
  }
  return m;
}

void copy_oscillators(const cpgloco::CpgState& s, cpg_oscillator* out) {
  for (std::size_t i = 0; i < cpgloco::kNumLegs; ++i) {
    const cpgloco::OscillatorState& o = s.legs[i];
    out[i] = {o.r_x, o.rdot_x, o.r_y, o.rdot_y, o.theta, o.theta_dot};
  }
}

cpg_episode_metrics to_c(const cpgloco::EpisodeMetrics& m) {
  cpg_episode_metrics c;
  c.cost_of_transport = m.cost_of_transport;
  c.cot_defined = m.cot_defined;
  c.mean_velocity = m.mean_velocity;
  c.mean_frequency_hz = m.mean_frequency_hz;
  c.mean_amplitude_rx = m.mean_amplitude_rx;
  c.mean_angular_velocity = m.mean_angular_velocity;
  c.mean_joint_acceleration = m.mean_joint_acceleration;
  c.mean_power = m.mean_power;
  c.mean_phase_residual = m.mean_phase_residual;
  c.total_reward = m.total_reward;
  c.duration = m.duration;
  c.mass = m.mass;
  c.collided = m.collided;
  c.completed = m.completed;
  c.success = m.success;
  return c;
}

cpg_status copy_string(const std::string& s, char* buf, std::size_t capacity,
                       std::size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return CPG_OK;
  if (capacity < s.size() + 1) return fail(CPG_ERR_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
  return CPG_OK;
}

void copy_observation(const cpgloco::Observation& obs, double* out) {
  std::memcpy(out, obs.data(), sizeof(double) * obs.size());
}

}  // namespace

extern "C" {

const char* cpg_version(void) { return "0.1.0"; }

const char* cpg_status_string(cpg_status status) {
  switch (status) {
    case CPG_OK:
      return "ok";
    case CPG_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case CPG_ERR_RANGE:
      return "value out of range";
    case CPG_ERR_STATE_CORRUPTION:
      return "state corruption";
    case CPG_ERR_WORKSPACE:
      return "target outside the leg workspace";
    case CPG_ERR_LAYOUT:
      return "layout mismatch";
    case CPG_ERR_LOAD:
      return "load failure";
    case CPG_ERR_SPEC:
      return "invalid specification";
    case CPG_ERR_IO:
      return "i/o failure";
    case CPG_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case CPG_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* cpg_last_error(void) { return g_last_error.c_str(); }

// ---- Network ---------------------------------------------------------------

cpg_status cpg_network_create_trot(double weight, cpg_network** out) {
  CPG_REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto net = std::make_unique<cpg_network>();
    net->config = cpgloco::trot_config(weight);
    *out = net.release();
  });
}

void cpg_network_destroy(cpg_network* net) { delete net; }

cpg_status cpg_network_set_state(cpg_network* net, const cpg_oscillator state[CPG_NUM_LEGS]) {
  CPG_REQUIRE(net && state, "null argument");
  cpgloco::CpgState s;
  for (std::size_t i = 0; i < cpgloco::kNumLegs; ++i) {
    s.legs[i] = {state[i].r_x,   state[i].rdot_x, state[i].r_y,
                 state[i].rdot_y, state[i].theta, state[i].theta_dot};
  }
  if (!s.finite()) return fail(CPG_ERR_STATE_CORRUPTION, "non-finite oscillator state");
  net->state = s;
  return CPG_OK;
}

cpg_status cpg_network_get_state(const cpg_network* net, cpg_oscillator state[CPG_NUM_LEGS]) {
  CPG_REQUIRE(net && state, "null argument");
  copy_oscillators(net->state, state);
  return CPG_OK;
}

cpg_status cpg_network_step(cpg_network* net, const cpg_modulation* cmd, int steps) {
  CPG_REQUIRE(net && cmd, "null argument");
  CPG_REQUIRE(steps >= 0, "negative step count");
  return guarded([&] {
    const cpgloco::ModulationCommand c = to_cpp(*cmd);
    cpgloco::CpgState s = net->state;
    for (int k = 0; k < steps; ++k) s = cpgloco::step(s, c, net->config);
    net->state = s;
  });
}

cpg_status cpg_network_phase_residual(const cpg_network* net, double* out) {
  CPG_REQUIRE(net && out, "null argument");
  return guarded([&] { *out = cpgloco::phase_locking_residual(net->state, net->config); });
}

// ---- Worlds ----------------------------------------------------------------

cpg_status cpg_world_create(const char* kind, double param, uint64_t seed, cpg_world** out) {
  CPG_REQUIRE(kind && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string k = kind;
    cpgloco::World w;
    if (k == "flat") {
      w = cpgloco::flat_world(param > 0.0 ? param : 40.0);
    } else if (k == "corridor") {
      w = cpgloco::corridor_world(param);
    } else if (k == "navigation") {
      w = cpgloco::navigation_world(seed);
    } else if (k == "generated") {
      w = cpgloco::generate_terrain(seed, param, 40.0);
    } else {
      throw cpgloco::SpecError("unknown world kind '" + k + "'");
    }
    *out = new cpg_world{std::make_shared<const cpgloco::World>(std::move(w))};
  });
}

cpg_status cpg_world_load(const char* path, cpg_world** out) {
  CPG_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new cpg_world{std::make_shared<const cpgloco::World>(cpgloco::World::load(path))};
  });
}

cpg_status cpg_world_save(const cpg_world* world, const char* path) {
  CPG_REQUIRE(world && path, "null argument");
  return guarded([&] { world->world->save(path); });
}

void cpg_world_destroy(cpg_world* world) { delete world; }

cpg_status cpg_world_height_at(const cpg_world* world, double x, double y, double* out) {
  CPG_REQUIRE(world && out, "null argument");
  *out = world->world->map.height_at(x, y);
  return CPG_OK;
}

// ---- Policies --------------------------------------------------------------

cpg_status cpg_policy_create_constant(const cpg_modulation* cmd, cpg_policy** out) {
  CPG_REQUIRE(cmd && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new cpg_policy{std::make_unique<cpgloco::ConstantPolicy>(to_cpp(*cmd))};
  });
}

cpg_status cpg_policy_create_vprop(double d_step, cpg_policy** out) {
  CPG_REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] {
    cpgloco::VelocityProportionalParams p;
    p.d_step = d_step;
    *out = new cpg_policy{std::make_unique<cpgloco::VelocityProportionalPolicy>(p)};
  });
}

cpg_status cpg_policy_create_network(const char* arch, uint64_t seed, int zero,
                                     cpg_policy** out) {
  CPG_REQUIRE(arch && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string a = arch;
    const std::size_t in = cpgloco::obs_layout::kSize;
    std::unique_ptr<cpgloco::Policy> p;
    if (a == "mlp") {
      p = std::make_unique<cpgloco::MlpPolicy>(zero ? cpgloco::MlpPolicy::zeros(in)
                                                    : cpgloco::MlpPolicy::random(in, seed));
    } else if (a == "lstm") {
      p = std::make_unique<cpgloco::LstmPolicy>(zero ? cpgloco::LstmPolicy::zeros(in)
                                                     : cpgloco::LstmPolicy::random(in, seed));
    } else {
      throw cpgloco::SpecError("unknown network architecture '" + a + "'");
    }
    *out = new cpg_policy{std::move(p)};
  });
}

cpg_status cpg_policy_load(const char* path, cpg_policy** out) {
  CPG_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cpg_policy{cpgloco::load_policy(path)}; });
}

cpg_status cpg_policy_save(const cpg_policy* policy, const char* path) {
  CPG_REQUIRE(policy && path, "null argument");
  return guarded([&] { cpgloco::save_weights(path, *policy->policy); });
}

void cpg_policy_destroy(cpg_policy* policy) { delete policy; }

cpg_status cpg_policy_evaluate(cpg_policy* policy, const double* obs, size_t n,
                               cpg_modulation* out) {
  CPG_REQUIRE(policy && obs && out, "null argument");
  return guarded([&] { *out = to_c(policy->policy->evaluate({obs, n})); });
}

cpg_status cpg_policy_reset(cpg_policy* policy) {
  CPG_REQUIRE(policy, "null argument");
  policy->policy->reset();
  return CPG_OK;
}

size_t cpg_policy_input_size(const cpg_policy* policy) {
  return policy ? policy->policy->input_size() : 0;
}

// ---- Environments ----------------------------------------------------------

cpg_status cpg_env_create(const cpg_world* world, const char* config_json, cpg_env** out) {
  CPG_REQUIRE(world && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    cpgloco::EnvironmentConfig cfg;
    if (config_json && *config_json) {
      nlohmann::json doc = nlohmann::json::parse(config_json);
      doc.erase("world");
      doc.erase("policy");
      cfg = cpgloco::parse_experiment_spec(doc.dump()).env;
    }
    *out = new cpg_env{std::make_unique<cpgloco::Environment>(world->world, cfg)};
  });
}

void cpg_env_destroy(cpg_env* env) { delete env; }

cpg_status cpg_env_reset(cpg_env* env, uint64_t seed, double* obs, size_t n) {
  CPG_REQUIRE(env, "null argument");
  if (obs && n < cpgloco::obs_layout::kSize)
    return fail(CPG_ERR_BUFFER_TOO_SMALL, "observation buffer too small");
  return guarded([&] {
    const cpgloco::Observation& o = env->env->reset(seed);
    if (obs) copy_observation(o, obs);
  });
}

cpg_status cpg_env_step(cpg_env* env, const cpg_modulation* action, cpg_step_info* info,
                        double* obs, size_t n) {
  CPG_REQUIRE(env && action, "null argument");
  if (obs && n < cpgloco::obs_layout::kSize)
    return fail(CPG_ERR_BUFFER_TOO_SMALL, "observation buffer too small");
  return guarded([&] {
    const cpgloco::StepResult r = env->env->step(to_cpp(*action));
    if (info) {
      info->time = env->env->time();
      info->reward = r.reward.total;
      info->termination = static_cast<int>(r.termination);
      info->done = r.done;
    }
    if (obs) copy_observation(env->env->observation(), obs);
  });
}

cpg_status cpg_env_robot_state(const cpg_env* env, cpg_robot_state* out) {
  CPG_REQUIRE(env && out, "null argument");
  const cpgloco::RobotState& r = env->env->robot();
  out->position[0] = r.position.x;
  out->position[1] = r.position.y;
  out->position[2] = r.position.z;
  out->roll = r.roll;
  out->pitch = r.pitch;
  out->yaw = r.yaw;
  out->lin_vel[0] = r.lin_vel.x;
  out->lin_vel[1] = r.lin_vel.y;
  out->lin_vel[2] = r.lin_vel.z;
  out->ang_vel[0] = r.ang_vel.x;
  out->ang_vel[1] = r.ang_vel.y;
  out->ang_vel[2] = r.ang_vel.z;
  for (std::size_t k = 0; k < cpgloco::kNumJoints; ++k) {
    out->q[k] = r.q[k];
    out->qdot[k] = r.qdot[k];
  }
  for (std::size_t i = 0; i < cpgloco::kNumLegs; ++i) out->contacts[i] = r.contacts[i];
  out->energy = r.energy;
  out->power = r.power;
  return CPG_OK;
}

cpg_status cpg_env_cpg_state(const cpg_env* env, cpg_oscillator out[CPG_NUM_LEGS]) {
  CPG_REQUIRE(env && out, "null argument");
  copy_oscillators(env->env->cpg(), out);
  return CPG_OK;
}

cpg_status cpg_env_metrics(const cpg_env* env, cpg_episode_metrics* out) {
  CPG_REQUIRE(env && out, "null argument");
  return guarded([&] { *out = to_c(env->env->metrics()); });
}

cpg_status cpg_env_rollout(cpg_env* env, cpg_policy* policy, uint64_t seed,
                           cpg_episode_metrics* out) {
  CPG_REQUIRE(env && policy, "null argument");
  return guarded([&] {
    const cpgloco::EpisodeMetrics m = env->env->rollout(*policy->policy, seed);
    if (out) *out = to_c(m);
  });
}

cpg_status cpg_observation_schema(char* buf, size_t capacity, size_t* needed) {
  std::string s;
  const cpg_status st = guarded([&] { s = cpgloco::observation_schema_json(); });
  if (st != CPG_OK) return st;
  return copy_string(s, buf, capacity, needed);
}

double cpg_expected_sensorimotor_delay_ms(double mass_kg) {
  if (!(mass_kg > 0.0)) return 0.0;
  return cpgloco::expected_sensorimotor_delay_ms(mass_kg);
}

// ---- Experiments -----------------------------------------------------------

cpg_status cpg_experiment_parse(const char* json, cpg_experiment** out) {
  CPG_REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto exp = std::make_unique<cpg_experiment>();
    try {
      exp->doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw cpgloco::SpecError(std::string("experiment spec is not valid JSON: ") + e.what());
    }
    exp->spec = cpgloco::parse_experiment_spec(exp->doc.dump());
    *out = exp.release();
  });
}

cpg_status cpg_experiment_load(const char* path, cpg_experiment** out) {
  CPG_REQUIRE(path && out, "null argument");
  *out = nullptr;
  std::string text;
  const cpg_status st = guarded([&] {
    // Parsing twice keeps the raw document for later patches.
    cpgloco::load_experiment_spec(path);
    std::ifstream in(path);
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  });
  if (st != CPG_OK) return st;
  return cpg_experiment_parse(text.c_str(), out);
}

void cpg_experiment_destroy(cpg_experiment* exp) { delete exp; }

cpg_status cpg_experiment_patch(cpg_experiment* exp, const char* json_patch) {
  CPG_REQUIRE(exp && json_patch, "null argument");
  return guarded([&] {
    nlohmann::json patch;
    try {
      patch = nlohmann::json::parse(json_patch);
    } catch (const nlohmann::json::exception& e) {
      throw cpgloco::SpecError(std::string("patch is not valid JSON: ") + e.what());
    }
    nlohmann::json doc = exp->doc;
    doc.merge_patch(patch);
    cpgloco::ExperimentSpec spec = cpgloco::parse_experiment_spec(doc.dump());
    exp->doc = std::move(doc);
    exp->spec = std::move(spec);
  });
}

cpg_status cpg_experiment_spec_json(const cpg_experiment* exp, char* buf, size_t capacity,
                                    size_t* needed) {
  CPG_REQUIRE(exp, "null argument");
  std::string s;
  const cpg_status st = guarded([&] { s = cpgloco::experiment_spec_json(exp->spec); });
  if (st != CPG_OK) return st;
  return copy_string(s, buf, capacity, needed);
}

cpg_status cpg_experiment_run(cpg_experiment* exp, const char* mode, const double* values,
                              size_t n_values, const char* out_dir) {
  CPG_REQUIRE(exp && mode, "null argument");
  CPG_REQUIRE(values || n_values == 0, "values is null");
  const std::string m = mode;
  if (m != "run" && m != "sweep-coupling" && m != "sweep-delay")
    return fail(CPG_ERR_INVALID_ARGUMENT, "unknown experiment mode '" + m + "'");
  return guarded([&] {
    const std::vector<double> vals(values, values + n_values);
    std::vector<cpgloco::ExperimentResult> results;
    if (m == "run") {
      results.push_back(cpgloco::run_experiment(exp->spec));
    } else if (m == "sweep-coupling") {
      results = cpgloco::sweep_coupling(
          exp->spec, vals.empty() ? cpgloco::kDefaultCouplingWeights : vals);
    } else {
      results = cpgloco::sweep_delay(exp->spec, vals.empty() ? cpgloco::kDefaultDelaysS : vals);
    }
    const std::string dir = out_dir && *out_dir ? out_dir : exp->spec.output.dir;
    if (!dir.empty()) cpgloco::write_results(dir, exp->spec, results);
    exp->results = std::move(results);
  });
}

size_t cpg_experiment_row_count(const cpg_experiment* exp) {
  return exp ? exp->results.size() : 0;
}

cpg_status cpg_experiment_summary(const cpg_experiment* exp, size_t row, cpg_summary_row* out) {
  CPG_REQUIRE(exp && out, "null argument");
  if (row >= exp->results.size()) return fail(CPG_ERR_RANGE, "summary row out of range");
  const cpgloco::SummaryRow& r = exp->results[row].summary;
  std::memset(out->label, 0, sizeof(out->label));
  std::strncpy(out->label, r.label.c_str(), sizeof(out->label) - 1);
  out->coupling_weight = r.coupling_weight;
  out->proprio_delay_s = r.proprio_delay_s;
  out->extero_delay_s = r.extero_delay_s;
  out->trials = r.trials;
  out->success_rate = r.success_rate;
  out->cost_of_transport = r.cost_of_transport;
  out->cot_trials = r.cot_trials;
  out->mean_velocity = r.mean_velocity;
  out->mean_frequency_hz = r.mean_frequency_hz;
  out->mean_amplitude_rx = r.mean_amplitude_rx;
  out->mean_angular_velocity = r.mean_angular_velocity;
  out->mean_joint_acceleration = r.mean_joint_acceleration;
  out->mean_phase_residual = r.mean_phase_residual;
  out->mean_reward = r.mean_reward;
  out->mean_duration = r.mean_duration;
  return CPG_OK;
}

cpg_status cpg_experiment_dump_world(const cpg_experiment* exp, const char* path) {
  CPG_REQUIRE(exp && path, "null argument");
  return guarded([&] {
    const cpgloco::ExperimentSpec& spec = exp->spec;
    const std::uint64_t seed =
        spec.world.per_trial ? cpgloco::trial_seed(spec.seed, 0) : spec.seed;
    cpgloco::build_world(spec.world, seed).save(path);
  });
}

}  // extern "C"
