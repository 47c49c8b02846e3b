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

/* Exercises the shared library through its C header only. */

#define _POSIX_C_SOURCE 200809L

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>
#include <sys/types.h>

#include "cpgloco/cpgloco.h"

static int g_failures = 0;
static int g_checks = 0;

#define CHECK(cond)                                                     \
  do {                                                                  \
    ++g_checks;                                                         \
    if (!(cond)) {                                                      \
      ++g_failures;                                                     \
      fprintf(stderr, "%s:%d: check failed: %s (last error: %s)\n",     \
              __FILE__, __LINE__, #cond, cpg_last_error());             \
    }                                                                   \
  } while (0)

#define CHECK_OK(call) CHECK((call) == CPG_OK)

static void uniform(cpg_modulation* m, double mu_x, double mu_y, double omega) {
  int i;
  for (i = 0; i < CPG_NUM_LEGS; ++i) {
    m->mu_x[i] = mu_x;
    m->mu_y[i] = mu_y;
    m->omega_hz[i] = omega;
  }
}

static int file_exists(const char* path) {
  FILE* f = fopen(path, "rb");
  if (!f) return 0;
  fclose(f);
  return 1;
}

static void test_basics(void) {
  CHECK(strlen(cpg_version()) > 0);
  CHECK(strcmp(cpg_status_string(CPG_OK), "ok") == 0);
  CHECK(strlen(cpg_status_string(CPG_ERR_SPEC)) > 0);
  CHECK(fabs(cpg_expected_sensorimotor_delay_ms(12.0) - 52.24) < 0.01);
}

static void test_network(void) {
  cpg_network* net = NULL;
  cpg_oscillator state[CPG_NUM_LEGS];
  cpg_modulation cmd;
  double residual = 1.0;
  int i;

  CHECK(cpg_network_create_trot(2.0, &net) == CPG_ERR_RANGE);
  CHECK(strlen(cpg_last_error()) > 0);
  CHECK(cpg_network_create_trot(1.0, NULL) == CPG_ERR_INVALID_ARGUMENT);

  CHECK_OK(cpg_network_create_trot(1.0, &net));
  CHECK_OK(cpg_network_get_state(net, state));
  for (i = 0; i < CPG_NUM_LEGS; ++i) state[i].theta = 0.7 * i;
  CHECK_OK(cpg_network_set_state(net, state));
  uniform(&cmd, 1.5, 1.5, 2.0);
  CHECK_OK(cpg_network_step(net, &cmd, 3000));
  CHECK_OK(cpg_network_phase_residual(net, &residual));
  CHECK(residual < 1e-3);
  CHECK_OK(cpg_network_get_state(net, state));
  CHECK(fabs(state[0].r_x - 1.5) < 1e-6);
  CHECK(fabs(state[0].theta_dot - 2.0 * 2.0 * acos(-1.0)) < 1e-3);

  state[1].r_y = NAN;
  CHECK(cpg_network_set_state(net, state) == CPG_ERR_STATE_CORRUPTION);
  CHECK_OK(cpg_network_get_state(net, state));
  CHECK(isfinite(state[1].r_y));
  cpg_network_destroy(net);
  cpg_network_destroy(NULL);
}

static void test_world(const char* work) {
  cpg_world* w = NULL;
  cpg_world* back = NULL;
  char path[512];
  double a = -1.0, b = -2.0;

  CHECK(cpg_world_create("volcano", 0.0, 0, &w) != CPG_OK);
  CHECK_OK(cpg_world_create("flat", 10.0, 0, &w));
  CHECK_OK(cpg_world_height_at(w, 1.0, 2.0, &a));
  CHECK(a == 0.0);
  cpg_world_destroy(w);

  CHECK_OK(cpg_world_create("corridor", 1.7, 0, &w));
  CHECK_OK(cpg_world_height_at(w, 3.0, 0.9, &a));
  CHECK(a >= 1.0);
  snprintf(path, sizeof path, "%s/corridor.json", work);
  CHECK_OK(cpg_world_save(w, path));
  CHECK_OK(cpg_world_load(path, &back));
  CHECK_OK(cpg_world_height_at(back, 3.0, 0.9, &b));
  CHECK(a == b);
  cpg_world_destroy(back);
  cpg_world_destroy(w);
  CHECK(cpg_world_load("/nonexistent/world.json", &back) == CPG_ERR_IO);
}

static void test_policy(const char* work) {
  cpg_policy* p = NULL;
  cpg_policy* q = NULL;
  cpg_modulation out, out2;
  double obs[CPG_OBS_SIZE];
  char path[512];
  int k;

  for (k = 0; k < CPG_OBS_SIZE; ++k) obs[k] = 0.01 * k;
  CHECK_OK(cpg_policy_create_network("mlp", 0, 1, &p));
  CHECK(cpg_policy_input_size(p) == CPG_OBS_SIZE);
  CHECK_OK(cpg_policy_evaluate(p, obs, CPG_OBS_SIZE, &out));
  CHECK(fabs(out.mu_x[0] - 1.5) < 1e-6);
  CHECK(fabs(out.omega_hz[3] - 2.25) < 1e-6);
  CHECK(cpg_policy_evaluate(p, obs, CPG_OBS_SIZE - 1, &out) == CPG_ERR_LAYOUT);
  cpg_policy_destroy(p);

  CHECK_OK(cpg_policy_create_network("lstm", 3, 0, &p));
  snprintf(path, sizeof path, "%s/lstm.cpgw", work);
  CHECK_OK(cpg_policy_save(p, path));
  CHECK_OK(cpg_policy_load(path, &q));
  CHECK_OK(cpg_policy_evaluate(p, obs, CPG_OBS_SIZE, &out));
  CHECK_OK(cpg_policy_evaluate(q, obs, CPG_OBS_SIZE, &out2));
  CHECK(memcmp(&out, &out2, sizeof out) == 0);
  CHECK_OK(cpg_policy_reset(q));
  cpg_policy_destroy(q);
  cpg_policy_destroy(p);
  CHECK(cpg_policy_create_network("transformer", 0, 1, &p) != CPG_OK);
  CHECK(cpg_policy_load("/nonexistent/w.cpgw", &p) == CPG_ERR_LOAD);

  CHECK_OK(cpg_policy_create_vprop(0.15, &p));
  memset(obs, 0, sizeof obs);
  CHECK_OK(cpg_policy_evaluate(p, obs, CPG_OBS_SIZE, &out));
  CHECK(out.omega_hz[0] == 0.0);
  cpg_policy_destroy(p);
}

static void test_env(void) {
  cpg_world* w = NULL;
  cpg_env* env = NULL;
  cpg_policy* p = NULL;
  cpg_modulation cmd;
  cpg_step_info info;
  cpg_robot_state robot;
  cpg_oscillator osc[CPG_NUM_LEGS];
  cpg_episode_metrics m;
  double obs[CPG_OBS_SIZE];
  int steps = 0;

  CHECK_OK(cpg_world_create("flat", 20.0, 0, &w));
  CHECK(cpg_env_create(w, "{\"episode\": {\"lenght\": 1}}", &env) == CPG_ERR_SPEC);
  CHECK_OK(cpg_env_create(w, "{\"episode\": {\"length\": 1.0}}", &env));
  CHECK(cpg_env_reset(env, 1, obs, 10) == CPG_ERR_BUFFER_TOO_SMALL);
  CHECK_OK(cpg_env_reset(env, 1, obs, CPG_OBS_SIZE));
  uniform(&cmd, 2.0, 1.5, 1.5);
  memset(&info, 0, sizeof info);
  while (!info.done && steps < 1000) {
    CHECK_OK(cpg_env_step(env, &cmd, &info, obs, CPG_OBS_SIZE));
    ++steps;
  }
  CHECK(steps == 100);
  CHECK(info.termination == CPG_TIMEOUT);
  CHECK(fabs(info.time - 1.0) < 1e-9);
  CHECK_OK(cpg_env_robot_state(env, &robot));
  CHECK(robot.position[0] > 0.3);
  CHECK(robot.energy > 0.0);
  CHECK_OK(cpg_env_cpg_state(env, osc));
  CHECK(osc[0].r_x > 1.9);
  CHECK_OK(cpg_env_metrics(env, &m));
  CHECK(m.success == 1);
  CHECK(m.mean_velocity > 0.3);

  CHECK_OK(cpg_policy_create_vprop(0.15, &p));
  CHECK_OK(cpg_env_rollout(env, p, 2, &m));
  CHECK(m.completed == 1);
  cpg_policy_destroy(p);
  cpg_env_destroy(env);
  cpg_world_destroy(w);
}

static void test_schema(void) {
  size_t needed = 0;
  char* buf;
  CHECK_OK(cpg_observation_schema(NULL, 0, &needed));
  CHECK(needed > 100);
  buf = (char*)malloc(needed);
  CHECK_OK(cpg_observation_schema(buf, needed, &needed));
  CHECK(strstr(buf, "\"size\":267") != NULL || strstr(buf, "\"size\": 267") != NULL);
  CHECK(strlen(buf) + 1 == needed);
  free(buf);
}

static void test_experiment(const char* work) {
  cpg_experiment* exp = NULL;
  cpg_summary_row row;
  char spec[512];
  char out_dir[512];
  char file[600];
  double delays[2] = {0.0, 0.05};

  snprintf(spec, sizeof spec, "%s/delay_sweep.json", CPGLOCO_TEST_DATA_DIR);
  CHECK_OK(cpg_experiment_load(spec, &exp));
  CHECK_OK(cpg_experiment_patch(exp, "{\"trials\": 1, \"episode\": {\"length\": 1.0}}"));
  CHECK(cpg_experiment_patch(exp, "{\"trials\": 0}") == CPG_ERR_SPEC);

  CHECK_OK(cpg_experiment_run(exp, "sweep-delay", NULL, 0, NULL));
  CHECK(cpg_experiment_row_count(exp) == 4);
  CHECK_OK(cpg_experiment_summary(exp, 3, &row));
  CHECK(fabs(row.proprio_delay_s - 0.09) < 1e-12);
  CHECK(row.trials == 1);
  CHECK(cpg_experiment_summary(exp, 4, &row) == CPG_ERR_RANGE);

  snprintf(out_dir, sizeof out_dir, "%s/sweep", work);
  CHECK_OK(cpg_experiment_run(exp, "sweep-coupling", delays, 2, out_dir));
  CHECK(cpg_experiment_row_count(exp) == 2);
  snprintf(file, sizeof file, "%s/summary.csv", out_dir);
  CHECK(file_exists(file));
  CHECK(cpg_experiment_run(exp, "sweep-sideways", NULL, 0, NULL) == CPG_ERR_INVALID_ARGUMENT);

  snprintf(file, sizeof file, "%s/world.json", work);
  CHECK_OK(cpg_experiment_dump_world(exp, file));
  CHECK(file_exists(file));
  cpg_experiment_destroy(exp);

  snprintf(spec, sizeof spec, "%s/bad_world.json", CPGLOCO_TEST_DATA_DIR);
  CHECK(cpg_experiment_load(spec, &exp) == CPG_ERR_SPEC);
  CHECK(cpg_experiment_parse("{\"policy\": {\"kind\": \"mlp\"}}", &exp) == CPG_ERR_SPEC);
}

int main(int argc, char** argv) {
  const char* work = argc > 1 ? argv[1] : "capi_work";
  mkdir(work, 0755);
  test_basics();
  test_network();
  test_world(work);
  test_policy(work);
  test_env();
  test_schema();
  test_experiment(work);
  printf("%d checks, %d failures\n", g_checks, g_failures);
  return g_failures == 0 ? 0 : 1;
}
