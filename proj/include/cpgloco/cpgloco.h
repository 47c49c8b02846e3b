/* Copyright 2026 The cpgloco Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the cpgloco shared library.
 *
 * Every object is an opaque handle created by a *_create / *_load function and
 * released by the matching *_destroy function (which accepts NULL). Fallible
 * calls return a cpg_status; on failure a description is available from
 * cpg_last_error() on the same thread until the next failing call.
 *
 * Handles are not internally synchronized. Distinct handles may be used from
 * different threads concurrently.
 */

#ifndef CPGLOCO_CPGLOCO_H_
#define CPGLOCO_CPGLOCO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CPGLOCO_BUILDING_LIBRARY)
#    define CPG_API __declspec(dllexport)
#  else
#    define CPG_API __declspec(dllimport)
#  endif
#else
#  define CPG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cpg_status {
  CPG_OK = 0,
  CPG_ERR_INVALID_ARGUMENT = 1,
  CPG_ERR_RANGE = 2,
  CPG_ERR_STATE_CORRUPTION = 3,
  CPG_ERR_WORKSPACE = 4,
  CPG_ERR_LAYOUT = 5,
  CPG_ERR_LOAD = 6,
  CPG_ERR_SPEC = 7,
  CPG_ERR_IO = 8,
  CPG_ERR_BUFFER_TOO_SMALL = 9,
  CPG_ERR_INTERNAL = 100
} cpg_status;

enum { CPG_NUM_LEGS = 4, CPG_NUM_JOINTS = 12, CPG_OBS_SIZE = 267 };

typedef enum cpg_termination {
  CPG_RUNNING = 0,
  CPG_COLLISION = 1,
  CPG_TIMEOUT = 2
} cpg_termination;

CPG_API const char* cpg_version(void);
CPG_API const char* cpg_status_string(cpg_status status);
/* Message of the last failure on this thread; "" when none. */
CPG_API const char* cpg_last_error(void);

/* ---- Plain data --------------------------------------------------------- */

typedef struct cpg_oscillator {
  double r_x, rdot_x, r_y, rdot_y;
  double theta;     /* rad, unwrapped */
  double theta_dot; /* rad/s */
} cpg_oscillator;

/* Per leg, order FL, FR, HL, HR. */
typedef struct cpg_modulation {
  double mu_x[CPG_NUM_LEGS];
  double mu_y[CPG_NUM_LEGS];
  double omega_hz[CPG_NUM_LEGS];
} cpg_modulation;

typedef struct cpg_velocity_command {
  double vx, vy, wz;
} cpg_velocity_command;

typedef struct cpg_robot_state {
  double position[3]; /* world, m */
  double roll, pitch, yaw;
  double lin_vel[3]; /* body, m/s */
  double ang_vel[3]; /* body, rad/s */
  double q[CPG_NUM_JOINTS];
  double qdot[CPG_NUM_JOINTS];
  int contacts[CPG_NUM_LEGS];
  double energy; /* J */
  double power;  /* W */
} cpg_robot_state;

typedef struct cpg_step_info {
  double time;
  double reward;
  int termination; /* cpg_termination */
  int done;
} cpg_step_info;

typedef struct cpg_episode_metrics {
  double cost_of_transport;
  int cot_defined;
  double mean_velocity;
  double mean_frequency_hz;
  double mean_amplitude_rx;
  double mean_angular_velocity;
  double mean_joint_acceleration;
  double mean_power;
  double mean_phase_residual;
  double total_reward;
  double duration;
  double mass;
  int collided;
  int completed;
  int success;
} cpg_episode_metrics;

typedef struct cpg_summary_row {
  char label[128];
  double coupling_weight;
  double proprio_delay_s;
  double extero_delay_s;
  int trials;
  double success_rate;
  double cost_of_transport;
  int cot_trials;
  double mean_velocity;
  double mean_frequency_hz;
  double mean_amplitude_rx;
  double mean_angular_velocity;
  double mean_joint_acceleration;
  double mean_phase_residual;
  double mean_reward;
  double mean_duration;
} cpg_summary_row;

/* ---- Oscillator network ------------------------------------------------- */

typedef struct cpg_network cpg_network;

/* Trot network with uniform coupling weight in [0, 1]; unit amplitudes, zero phases. */
CPG_API cpg_status cpg_network_create_trot(double weight, cpg_network** out);
CPG_API void cpg_network_destroy(cpg_network* net);
CPG_API cpg_status cpg_network_set_state(cpg_network* net,
                                         const cpg_oscillator state[CPG_NUM_LEGS]);
CPG_API cpg_status cpg_network_get_state(const cpg_network* net,
                                         cpg_oscillator state[CPG_NUM_LEGS]);
/* Advances `steps` integration steps of the network's dt under `cmd`. */
CPG_API cpg_status cpg_network_step(cpg_network* net, const cpg_modulation* cmd, int steps);
CPG_API cpg_status cpg_network_phase_residual(const cpg_network* net, double* out);

/* ---- Worlds ------------------------------------------------------------- */

typedef struct cpg_world cpg_world;

/* kind: "flat" (param: arena size), "corridor" (param: width),
 * "navigation" (param unused), "generated" (param: difficulty in [0, 1]). */
CPG_API cpg_status cpg_world_create(const char* kind, double param, uint64_t seed,
                                    cpg_world** out);
CPG_API cpg_status cpg_world_load(const char* path, cpg_world** out);
CPG_API cpg_status cpg_world_save(const cpg_world* world, const char* path);
CPG_API void cpg_world_destroy(cpg_world* world);
CPG_API cpg_status cpg_world_height_at(const cpg_world* world, double x, double y, double* out);

/* ---- Policies ----------------------------------------------------------- */

typedef struct cpg_policy cpg_policy;

CPG_API cpg_status cpg_policy_create_constant(const cpg_modulation* cmd, cpg_policy** out);
/* Velocity-proportional trot; d_step in m. */
CPG_API cpg_status cpg_policy_create_vprop(double d_step, cpg_policy** out);
/* arch: "mlp" or "lstm" with the default layer sizes for CPG_OBS_SIZE inputs.
 * zero != 0 gives all-zero weights, otherwise seeded uniform weights. */
CPG_API cpg_status cpg_policy_create_network(const char* arch, uint64_t seed, int zero,
                                             cpg_policy** out);
CPG_API cpg_status cpg_policy_load(const char* path, cpg_policy** out);
CPG_API cpg_status cpg_policy_save(const cpg_policy* policy, const char* path);
CPG_API void cpg_policy_destroy(cpg_policy* policy);
CPG_API cpg_status cpg_policy_evaluate(cpg_policy* policy, const double* obs, size_t n,
                                       cpg_modulation* out);
CPG_API cpg_status cpg_policy_reset(cpg_policy* policy);
CPG_API size_t cpg_policy_input_size(const cpg_policy* policy);

/* ---- Environments ------------------------------------------------------- */

typedef struct cpg_env cpg_env;

/* config_json: an experiment spec document (or NULL for defaults); its world
 * and policy sections are ignored. The world is copied. */
CPG_API cpg_status cpg_env_create(const cpg_world* world, const char* config_json,
                                  cpg_env** out);
CPG_API void cpg_env_destroy(cpg_env* env);
/* obs may be NULL; otherwise n must be at least CPG_OBS_SIZE. */
CPG_API cpg_status cpg_env_reset(cpg_env* env, uint64_t seed, double* obs, size_t n);
CPG_API cpg_status cpg_env_step(cpg_env* env, const cpg_modulation* action, cpg_step_info* info,
                                double* obs, size_t n);
CPG_API cpg_status cpg_env_robot_state(const cpg_env* env, cpg_robot_state* out);
CPG_API cpg_status cpg_env_cpg_state(const cpg_env* env, cpg_oscillator out[CPG_NUM_LEGS]);
CPG_API cpg_status cpg_env_metrics(const cpg_env* env, cpg_episode_metrics* out);
/* Runs `policy` from reset(seed) until the episode ends. */
CPG_API cpg_status cpg_env_rollout(cpg_env* env, cpg_policy* policy, uint64_t seed,
                                   cpg_episode_metrics* out);

/* Writes the JSON description of the observation layout into buf (NUL
 * terminated). *needed receives the required size including the terminator. */
CPG_API cpg_status cpg_observation_schema(char* buf, size_t capacity, size_t* needed);
CPG_API double cpg_expected_sensorimotor_delay_ms(double mass_kg);

/* ---- Experiments -------------------------------------------------------- */

typedef struct cpg_experiment cpg_experiment;

CPG_API cpg_status cpg_experiment_load(const char* path, cpg_experiment** out);
CPG_API cpg_status cpg_experiment_parse(const char* json, cpg_experiment** out);
CPG_API void cpg_experiment_destroy(cpg_experiment* exp);
/* Merges a JSON object into the spec (RFC 7386) and revalidates it. */
CPG_API cpg_status cpg_experiment_patch(cpg_experiment* exp, const char* json_patch);
/* Effective spec with defaults filled in. */
CPG_API cpg_status cpg_experiment_spec_json(const cpg_experiment* exp, char* buf,
                                            size_t capacity, size_t* needed);

/* Runs the experiment once ("run"), over coupling weights ("sweep-coupling")
 * or over delays in seconds ("sweep-delay"). values may be NULL to use the
 * defaults {0, 0.2, ..., 1} and {0, 0.03, 0.06, 0.09}. Results are kept in
 * the handle and, when out_dir is non-empty (or the spec names an output
 * directory), written there. */
CPG_API cpg_status cpg_experiment_run(cpg_experiment* exp, const char* mode, const double* values,
                                      size_t n_values, const char* out_dir);
CPG_API size_t cpg_experiment_row_count(const cpg_experiment* exp);
CPG_API cpg_status cpg_experiment_summary(const cpg_experiment* exp, size_t row,
                                          cpg_summary_row* out);
/* Saves the world of trial 0 as a world file. */
CPG_API cpg_status cpg_experiment_dump_world(const cpg_experiment* exp, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* CPGLOCO_CPGLOCO_H_ */
