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


#include <cmath>
#include <random>
#include <vector>

#include "cpgloco/metrics.hpp"
#include "doctest.h"

using namespace cpgloco;

namespace {

std::vector<TraceSample> straight_walk(int n, double speed) {
  std::vector<TraceSample> trace;
  for (int k = 0; k < n; ++k) {
    TraceSample s;
    s.t = 0.001 * k;
    s.lin_vel = {speed, 0.0, 0.0};
    for (auto& o : s.cpg.legs) {
      o.r_x = 1.8;
      o.theta_dot = kTwoPi * 2.0;
    }
    s.power = 30.0;
    trace.push_back(s);
  }
  return trace;
}

}  // namespace

TEST_CASE("default reward weights") {
  const RewardWeights w;
  CHECK(w.dt == 0.01);
  CHECK(w.track_vx == 3.0);
  CHECK(w.track_vy == 0.75);
  CHECK(w.track_wz == 0.5);
  CHECK(w.vz == 2.0);
  CHECK(w.wxy == 0.05);
  CHECK(w.power == 0.001);
  CHECK(w.kernel_width == 0.25);
}

TEST_CASE("perfect tracking earns the full per-step reward") {
  const VelocityCommand cmd{0.35, -0.1, 0.2};
  const RewardTerms r = reward_step({0.35, -0.1, 0.0}, {0.0, 0.0, 0.2}, 0.0, cmd);
  CHECK(r.total == doctest::Approx(0.0425).epsilon(1e-12));
  CHECK(r.penalty_power == 0.0);

  const RewardTerms zero = reward_step({}, {}, 0.0, {});
  CHECK(zero.total == doctest::Approx(0.0425).epsilon(1e-12));
}

TEST_CASE("individual terms") {
  const RewardTerms r = reward_step({0.0, 0.0, 0.0}, {}, 0.0, {0.5, 0.0, 0.0});
  CHECK(r.track_vx == doctest::Approx(0.03 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(r.track_vx == doctest::Approx(0.011036).epsilon(1e-4));

  const RewardTerms p = reward_step({0.0, 0.0, 0.2}, {0.3, -0.4, 0.0}, 50.0, {});
  CHECK(p.penalty_vz == doctest::Approx(-2.0 * 0.01 * 0.04));
  CHECK(p.penalty_wxy == doctest::Approx(-0.05 * 0.01 * 0.25));
  CHECK(p.penalty_power == doctest::Approx(-0.001 * 0.01 * 50.0));

  JointVector tau{};
  JointVector qdot{};
  tau[0] = 2.0;
  qdot[0] = 3.0;
  tau[1] = 1.0;
  qdot[1] = -4.0;
  CHECK(mechanical_power(tau, qdot, PowerMode::kPerJointAbs) == doctest::Approx(10.0));
  CHECK(mechanical_power(tau, qdot, PowerMode::kAbsOfSum) == doctest::Approx(2.0));
  const RewardTerms from_tau = reward_step({}, {}, tau, qdot, {});
  CHECK(from_tau.penalty_power == doctest::Approx(-0.001 * 0.01 * 10.0));
}

TEST_CASE("reward bounds over random states") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const RewardWeights w;
  for (int k = 0; k < 10000; ++k) {
    const RewardTerms r = reward_step({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)},
                                      std::abs(100 * u(rng)), {u(rng), u(rng), u(rng)});
    REQUIRE(r.track_vx > 0.0);
    REQUIRE(r.track_vx <= w.track_vx * w.dt);
    REQUIRE(r.track_vy <= w.track_vy * w.dt);
    REQUIRE(r.track_wz <= w.track_wz * w.dt);
    REQUIRE(r.penalty_vz <= 0.0);
    REQUIRE(r.penalty_wxy <= 0.0);
    REQUIRE(r.penalty_power <= 0.0);
    REQUIRE(r.total <= 0.0425 + 1e-15);
  }
}

TEST_CASE("reward does not depend on heading") {
  // Body-frame inputs are all that enter; the same motion seen from any yaw
  // produces the same body-frame velocities and therefore the same reward.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec3 world_vel{u(rng), u(rng), u(rng)};
    const VelocityCommand cmd{u(rng), u(rng), u(rng)};
    const Vec3 ang{u(rng), u(rng), u(rng)};
    double reference = 0.0;
    for (int j = 0; j < 8; ++j) {
      const double yaw = kTwoPi * j / 8.0;
      // Rotate the world and the robot together: body velocity is unchanged.
      const double c = std::cos(yaw), s = std::sin(yaw);
      const Vec3 rotated{c * world_vel.x - s * world_vel.y, s * world_vel.x + c * world_vel.y,
                         world_vel.z};
      const Vec3 body{c * rotated.x + s * rotated.y, -s * rotated.x + c * rotated.y, rotated.z};
      const double r = reward_step(body, ang, 5.0, cmd).total;
      if (j == 0) reference = r;
      REQUIRE(r == doctest::Approx(reference).epsilon(1e-12));
    }
  }
}

TEST_CASE("cost of transport") {
  const CostOfTransport c = cost_of_transport(30.0, 12.0, 0.35);
  CHECK(c.defined);
  CHECK(c.value == doctest::Approx(0.728).epsilon(1e-3 / 0.728));
  CHECK(cost_of_transport(0.0, 12.0, 0.35).value == 0.0);
  CHECK(cost_of_transport(60.0, 12.0, 0.35).value == doctest::Approx(2 * c.value));
  CHECK(cost_of_transport(30.0, 12.0, 0.175).value == doctest::Approx(2 * c.value));
  CHECK_FALSE(cost_of_transport(30.0, 12.0, 0.0).defined);
  CHECK_FALSE(cost_of_transport(30.0, 12.0, -0.1).defined);
}

TEST_CASE("episode means over a straight walk") {
  const auto trace = straight_walk(2000, 0.35);
  const EpisodeMetrics m = episode_metrics(trace, 12.0, false, true);
  CHECK(m.mean_angular_velocity == 0.0);
  CHECK(m.mean_velocity == doctest::Approx(0.35));
  CHECK(m.mean_frequency_hz == doctest::Approx(2.0));
  CHECK(m.mean_amplitude_rx == doctest::Approx(1.8));
  CHECK(m.mean_joint_acceleration == 0.0);
  CHECK(m.cost_of_transport == doctest::Approx(30.0 / (12.0 * 9.81 * 0.35)));
  CHECK(m.success);
  CHECK(m.duration == doctest::Approx(1.999));
}

TEST_CASE("joint acceleration from finite differences of a velocity ramp") {
  auto trace = straight_walk(1000, 0.3);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      trace[k].qdot[j] = (j % 2 == 0 ? 1.0 : -1.0) * trace[k].t;
    }
  }
  const EpisodeMetrics m = episode_metrics(trace, 12.0, false, true);
  CHECK(m.mean_joint_acceleration == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("success requires completion without collision") {
  const auto trace = straight_walk(100, 0.3);
  CHECK_FALSE(episode_metrics(trace, 12.0, true, false).success);
  CHECK_FALSE(episode_metrics(trace, 12.0, true, true).success);
  CHECK_FALSE(episode_metrics(trace, 12.0, false, false).success);
  CHECK(episode_metrics(trace, 12.0, false, true).success);
}

TEST_CASE("streaming accumulation matches the batch form") {
  auto trace = straight_walk(500, 0.2);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (auto& s : trace) {
    s.ang_vel = {n(rng), n(rng), n(rng)};
    s.power = std::abs(n(rng));
    for (auto& q : s.qdot) q = n(rng);
    for (auto& o : s.cpg.legs) o.theta = n(rng);
  }
  const Matrix4 biases = trot_phase_biases();
  MetricsAccumulator acc(biases);
  for (const auto& s : trace) acc.add(s);
  acc.add_reward(1.25);
  const EpisodeMetrics a = acc.result(12.0, false, true);
  const EpisodeMetrics b = episode_metrics(trace, 12.0, false, true, biases);
  CHECK(a.mean_joint_acceleration == b.mean_joint_acceleration);
  CHECK(a.mean_phase_residual == b.mean_phase_residual);
  CHECK(a.mean_phase_residual > 0.0);
  CHECK(a.total_reward == 1.25);
  CHECK(acc.samples() == trace.size());
}
