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
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cpgloco/policy.hpp"
#include "doctest.h"

using namespace cpgloco;

namespace {

constexpr std::size_t kIn = obs_layout::kSize;

std::vector<double> random_obs(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> obs(kIn);
  for (double& v : obs) v = n(rng);
  return obs;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cpgloco_test_" + name);
}

bool in_ranges(const ModulationCommand& c, const ActionScaler& s) {
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    if (!s.mu_x.contains(c.mu_x[i]) || !s.mu_y.contains(c.mu_y[i]) ||
        !s.omega_hz.contains(c.omega_hz[i])) {
      return false;
    }
  }
  return true;
}

std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("zero networks command the range midpoints") {
  MlpPolicy mlp = MlpPolicy::zeros(kIn);
  std::mt19937_64 rng(1);
  const ModulationCommand c = mlp.evaluate(random_obs(rng));
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    CHECK(c.mu_x[i] == doctest::Approx(1.5));
    CHECK(c.mu_y[i] == doctest::Approx(1.5));
    CHECK(c.omega_hz[i] == doctest::Approx(2.25));
  }
  CHECK(mlp.raw_output().isZero());
  CHECK(mlp.layers().size() == 4);
  CHECK(mlp.layers()[0].weight.rows() == 512);
  CHECK(mlp.layers()[1].weight.rows() == 256);
  CHECK(mlp.layers()[2].weight.rows() == 128);

  LstmPolicy lstm = LstmPolicy::zeros(kIn);
  CHECK(lstm.hidden_units() == 512);
  const auto obs = random_obs(rng);
  const ModulationCommand first = lstm.evaluate(obs);
  const ModulationCommand second = lstm.evaluate(obs);
  CHECK(first == second);
  CHECK(first.omega_hz[0] == doctest::Approx(2.25));
}

TEST_CASE("saturated outputs reach the top of every range") {
  const ActionScaler s;
  ActionVector ones;
  ones.fill(1.0);
  const ModulationCommand top = s.from_normalized(ones);
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    CHECK(top.mu_x[i] == 2.0);
    CHECK(top.mu_y[i] == 2.0);
    CHECK(top.omega_hz[i] == 4.5);
  }
  ActionVector minus;
  minus.fill(-1.0);
  CHECK(s.from_normalized(minus).omega_hz[2] == 0.0);

  // A head bias driving the tanh into saturation.
  std::vector<DenseLayer> layers = MlpPolicy::zeros(kIn, {8}).layers();
  layers.back().bias.setConstant(40.0f);
  MlpPolicy big(layers);
  std::vector<double> obs(kIn, 0.0);
  const ModulationCommand c = big.evaluate(obs);
  CHECK(c.omega_hz[3] == doctest::Approx(4.5));
  CHECK(c.mu_x[0] == doctest::Approx(2.0));
}

TEST_CASE("scaler maps linearly and round-trips") {
  ActionScaler s;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ActionVector a;
  for (double& v : a) v = u(rng);
  const ActionVector back = s.normalize(s.from_normalized(a));
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(back[k] == doctest::Approx(a[k]));

  ActionVector bad{};
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  bad[8] = 7.0;
  const ModulationCommand c = s.from_normalized(bad);
  CHECK(c.mu_x[0] == 1.5);
  CHECK(c.omega_hz[0] == 4.5);

  s.squash = Squash::kClamp;
  std::vector<float> raw(12, 3.0f);
  raw[4] = 0.5f;
  const ModulationCommand clamped = s.from_raw(raw);
  CHECK(clamped.mu_x[1] == 2.0);
  CHECK(clamped.mu_y[0] == doctest::Approx(1.75));

  ActionScaler broken;
  broken.omega_hz = {1.0, 1.0};
  CHECK_THROWS_AS(broken.validate(), RangeError);
  CHECK(parse_squash("clamp") == Squash::kClamp);
  CHECK(parse_activation(activation_name(Activation::kRelu)) == Activation::kRelu);
  CHECK_THROWS(parse_activation("swish"));
}

TEST_CASE("wrong observation length is a layout error") {
  MlpPolicy mlp = MlpPolicy::zeros(kIn, {4});
  std::vector<double> obs(kIn - 1, 0.0);
  CHECK_THROWS_AS(mlp.evaluate(obs), LayoutError);
  ConstantPolicy constant(ModulationCommand::uniform(2.0, 1.5, 2.0));
  CHECK_THROWS_AS(constant.evaluate(obs), LayoutError);
}

TEST_CASE("LSTM state carries history and reset restores it") {
  LstmPolicy lstm = LstmPolicy::random(kIn, 5, 32, {16, 8});
  std::mt19937_64 rng(3);
  const auto first_obs = random_obs(rng);
  const ModulationCommand first = lstm.evaluate(first_obs);
  CHECK_FALSE(lstm.hidden_state().isZero());
  const ModulationCommand again = lstm.evaluate(first_obs);
  CHECK_FALSE(first == again);
  for (int k = 0; k < 20; ++k) lstm.evaluate(random_obs(rng));
  lstm.reset();
  CHECK(lstm.hidden_state().isZero());
  CHECK(lstm.cell_state().isZero());
  CHECK(lstm.evaluate(first_obs) == first);
}

TEST_CASE("MLP evaluation is a pure function of the observation") {
  MlpPolicy a = MlpPolicy::random(kIn, 7, {64, 32});
  MlpPolicy b = MlpPolicy::random(kIn, 7, {64, 32});
  std::mt19937_64 rng(4);
  std::vector<std::vector<double>> stream;
  for (int k = 0; k < 50; ++k) stream.push_back(random_obs(rng));
  const ModulationCommand ref = a.evaluate(stream[0]);
  for (const auto& obs : stream) CHECK(a.evaluate(obs) == b.evaluate(obs));
  CHECK(a.evaluate(stream[0]) == ref);
  CHECK_FALSE(MlpPolicy::random(kIn, 8, {64, 32}).evaluate(stream[0]) == ref);
}

TEST_CASE("outputs stay inside the action ranges") {
  std::mt19937_64 rng(6);
  for (Squash squash : {Squash::kTanh, Squash::kClamp}) {
    std::vector<DenseLayer> layers = MlpPolicy::random(kIn, 9, {32}).layers();
    for (auto& l : layers) l.weight *= 50.0f;
    MlpPolicy mlp(layers, Activation::kRelu);
    ActionScaler s;
    s.squash = squash;
    mlp.set_scaler(s);
    LstmPolicy lstm = LstmPolicy::random(kIn, 10, 16, {8});
    lstm.set_scaler(s);
    for (int k = 0; k < 500; ++k) {
      const auto obs = random_obs(rng, 100.0);
      REQUIRE(in_ranges(mlp.evaluate(obs), s));
      REQUIRE(in_ranges(lstm.evaluate(obs), s));
    }
  }
}

TEST_CASE("weight files round-trip bit for bit") {
  std::mt19937_64 rng(11);
  std::vector<std::vector<double>> obs;
  for (int k = 0; k < 100; ++k) obs.push_back(random_obs(rng));

  SUBCASE("mlp") {
    MlpPolicy mlp = MlpPolicy::random(kIn, 12, {64, 32, 16});
    const auto path = scratch("mlp.cpgw");
    save_weights(path, mlp);
    auto loaded = load_policy(path);
    CHECK(loaded->kind() == PolicyKind::kMlp);
    for (const auto& o : obs) REQUIRE(loaded->evaluate(o) == mlp.evaluate(o));
    auto typed = load_policy(path, PolicyKind::kMlp);
    CHECK(typed->input_size() == kIn);
    std::filesystem::remove(path);
  }
  SUBCASE("lstm") {
    LstmPolicy lstm = LstmPolicy::random(kIn, 13, 24, {16, 8});
    const auto path = scratch("lstm.cpgw");
    save_weights(path, lstm);
    auto loaded = load_policy(path, PolicyKind::kLstm);
    for (const auto& o : obs) REQUIRE(loaded->evaluate(o) == lstm.evaluate(o));
    std::filesystem::remove(path);
  }
  SUBCASE("scaler settings survive") {
    MlpPolicy mlp = MlpPolicy::zeros(kIn, {4});
    ActionScaler s;
    s.squash = Squash::kClamp;
    s.omega_hz = {0.0, 3.0};
    mlp.set_scaler(s);
    const auto path = scratch("scaler.cpgw");
    save_weights(path, mlp);
    auto loaded = load_policy(path);
    CHECK(loaded->scaler().squash == Squash::kClamp);
    CHECK(loaded->scaler().omega_hz.hi == 3.0);
    std::filesystem::remove(path);
  }
}

TEST_CASE("damaged or mismatched weight files are rejected") {
  MlpPolicy mlp = MlpPolicy::random(kIn, 14, {16});
  const auto path = scratch("damaged.cpgw");
  save_weights(path, mlp);
  const std::vector<char> good = read_bytes(path);

  SUBCASE("truncated") {
    write_bytes(path, {good.begin(), good.begin() + static_cast<long>(good.size() / 2)});
    CHECK_THROWS_AS(load_policy(path), LoadError);
    write_bytes(path, {good.begin(), good.begin() + 6});
    CHECK_THROWS_AS(load_policy(path), LoadError);
  }
  SUBCASE("flipped payload byte names its tensor") {
    std::vector<char> bad = good;
    bad[bad.size() - 3] ^= 0x40;
    write_bytes(path, bad);
    try {
      load_policy(path);
      FAIL("expected a load error");
    } catch (const LoadError& e) {
      CHECK_FALSE(e.tensor().empty());
      CHECK(std::string(e.what()).find("checksum") != std::string::npos);
    }
  }
  SUBCASE("feed-forward file read as recurrent") {
    try {
      load_policy(path, PolicyKind::kLstm);
      FAIL("expected a load error");
    } catch (const LoadError& e) {
      CHECK(e.tensor() == "lstm.weight_hh");
    }
  }
  SUBCASE("not a weight file") {
    write_bytes(path, {'n', 'o', 'p', 'e', 0, 0, 0, 0, 0, 0});
    CHECK_THROWS_AS(load_policy(path), LoadError);
    CHECK_THROWS_AS(load_policy(scratch("missing.cpgw")), LoadError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("constant policy repeats its command") {
  const ModulationCommand cmd = ModulationCommand::uniform(2.0, 1.5, 2.0);
  ConstantPolicy policy(cmd);
  std::mt19937_64 rng(15);
  for (int k = 0; k < 10; ++k) CHECK(policy.evaluate(random_obs(rng)) == cmd);
  CHECK(std::string(policy_kind_name(policy.kind())) == "constant");
}

TEST_CASE("velocity-proportional trot") {
  VelocityProportionalPolicy policy;
  const auto& p = policy.params();
  const ActionScaler& s = policy.scaler();

  const ModulationCommand stand = policy.command_for(0.0, 0.0);
  CHECK(stand.mu_x[0] == s.mu_x.lo);
  CHECK(stand.omega_hz[0] == 0.0);

  for (double v : {0.1, 0.35, 0.6}) {
    const ModulationCommand c = policy.command_for(v, 0.0);
    GaitShapeParams g;
    const double f = 2.0 * (c.mu_x[0] - g.mu_min) / (g.mu_max - g.mu_min) - 1.0;
    CHECK(p.speed_gain * p.d_step * f * c.omega_hz[0] == doctest::Approx(v));
    // Lowest-frequency branch: full amplitude.
    CHECK(c.mu_x[0] == doctest::Approx(2.0));
    CHECK(c.mu_y[0] == p.mu_y_neutral);
  }
  const ModulationCommand back = policy.command_for(-0.3, 0.0);
  CHECK(back.mu_x[0] == doctest::Approx(1.0));
  CHECK(back.omega_hz[0] == doctest::Approx(0.3 / (p.speed_gain * p.d_step)));

  std::vector<double> obs(kIn, 0.0);
  obs[obs_layout::kCommandsOffset] = 0.35;
  CHECK(policy.evaluate(obs) == policy.command_for(0.35, 0.0));

  // A lateral command moves the feet opposite to the requested direction.
  const ModulationCommand side = policy.command_for(0.2, 0.2);
  CHECK(side.mu_y[0] < 1.5);
  CHECK(std::string(policy_kind_name(policy.kind())) == "vprop");
}
