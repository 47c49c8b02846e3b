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

// Observation-to-modulation policies: feed-forward and recurrent networks
// with serialized weights, plus open-loop scripted baselines.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cpgloco/cpg.hpp"
#include "cpgloco/observation.hpp"

namespace cpgloco {

enum class Squash { kTanh, kClamp };
enum class Activation { kElu, kTanh, kRelu };

const char* squash_name(Squash s);
const char* activation_name(Activation a);
Squash parse_squash(const std::string& name);
Activation parse_activation(const std::string& name);

// Maps normalized actions [mu_x(4), mu_y(4), omega(4)] in [-1, 1] onto the
// modulation ranges.
struct ActionScaler {
  Range mu_x = kMuRange;
  Range mu_y = kMuRange;
  Range omega_hz = kOmegaRangeHz;
  Squash squash = Squash::kTanh;

  void validate() const;
  // Applies the squashing function, then the linear map.
  ModulationCommand from_raw(std::span<const float> raw) const;
  ModulationCommand from_normalized(const ActionVector& a) const;
  ActionVector normalize(const ModulationCommand& cmd) const;
};

enum class PolicyKind { kMlp, kLstm, kConstant, kVelocityProportional };

const char* policy_kind_name(PolicyKind k);

class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyKind kind() const = 0;
  // Required observation length.
  virtual std::size_t input_size() const = 0;
  // Throws LayoutError when obs.size() != input_size().
  virtual ModulationCommand evaluate(std::span<const double> obs) = 0;
  // Clears recurrent state; no-op for stateless policies.
  virtual void reset() {}
  virtual std::unique_ptr<Policy> clone() const = 0;

  const ActionScaler& scaler() const { return scaler_; }
  void set_scaler(const ActionScaler& s) {
    s.validate();
    scaler_ = s;
  }

 protected:
  void check_input(std::span<const double> obs) const;

  ActionScaler scaler_;
};

struct DenseLayer {
  Eigen::MatrixXf weight;  // out x in
  Eigen::VectorXf bias;    // out
};

class MlpPolicy final : public Policy {
 public:
  // layers.back() is the linear output layer.
  MlpPolicy(std::vector<DenseLayer> layers, Activation activation = Activation::kElu);

  static MlpPolicy zeros(std::size_t input_size, const std::vector<int>& hidden = {512, 256, 128},
                         int output_size = 12);
  static MlpPolicy random(std::size_t input_size, std::uint64_t seed,
                          const std::vector<int>& hidden = {512, 256, 128}, int output_size = 12);

  PolicyKind kind() const override { return PolicyKind::kMlp; }
  std::size_t input_size() const override { return layers_.front().weight.cols(); }
  ModulationCommand evaluate(std::span<const double> obs) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<MlpPolicy>(*this); }

  // Pre-squash network output.
  const Eigen::VectorXf& raw_output() const { return out_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  Activation activation() const { return activation_; }

 private:
  std::vector<DenseLayer> layers_;
  Activation activation_;
  Eigen::VectorXf in_, a_, b_, out_;
};

struct LstmLayer {
  // PyTorch gate order: input, forget, cell, output.
  Eigen::MatrixXf weight_ih;  // 4H x in
  Eigen::MatrixXf weight_hh;  // 4H x H
  Eigen::VectorXf bias_ih;    // 4H
  Eigen::VectorXf bias_hh;    // 4H
};

class LstmPolicy final : public Policy {
 public:
  // dense: hidden dense layers followed by the linear output head.
  LstmPolicy(LstmLayer lstm, std::vector<DenseLayer> dense,
             Activation activation = Activation::kElu);

  static LstmPolicy zeros(std::size_t input_size, int hidden_units = 512,
                          const std::vector<int>& dense = {256, 128}, int output_size = 12);
  static LstmPolicy random(std::size_t input_size, std::uint64_t seed, int hidden_units = 512,
                           const std::vector<int>& dense = {256, 128}, int output_size = 12);

  PolicyKind kind() const override { return PolicyKind::kLstm; }
  std::size_t input_size() const override { return lstm_.weight_ih.cols(); }
  ModulationCommand evaluate(std::span<const double> obs) override;
  void reset() override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<LstmPolicy>(*this); }

  int hidden_units() const { return static_cast<int>(lstm_.weight_hh.cols()); }
  const Eigen::VectorXf& hidden_state() const { return h_; }
  const Eigen::VectorXf& cell_state() const { return c_; }
  const Eigen::VectorXf& raw_output() const { return out_; }
  const LstmLayer& lstm() const { return lstm_; }
  const std::vector<DenseLayer>& dense() const { return dense_; }
  Activation activation() const { return activation_; }

 private:
  LstmLayer lstm_;
  std::vector<DenseLayer> dense_;
  Activation activation_;
  Eigen::VectorXf in_, gates_, h_, c_, a_, b_, out_;
};

class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(const ModulationCommand& cmd,
                          std::size_t input_size = obs_layout::kSize);

  PolicyKind kind() const override { return PolicyKind::kConstant; }
  std::size_t input_size() const override { return input_size_; }
  ModulationCommand evaluate(std::span<const double> obs) override;
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<ConstantPolicy>(*this);
  }

  const ModulationCommand& command() const { return cmd_; }

 private:
  ModulationCommand cmd_;
  std::size_t input_size_;
};

// Open-loop trot tracking the commanded base velocity from the observation:
//   omega = |vx| / (gain * d_step),  f(r_x) = sign(vx)
// at the lowest frequency that keeps |f| <= 1; a lateral command uses the
// remaining amplitude channel at that frequency. gain is the base speed per
// unit (d_step * f * omega) of the pinned-stance model.
struct VelocityProportionalParams {
  double d_step = 0.15;
  double speed_gain = 4.0;
  double mu_y_neutral = 1.5;
};

class VelocityProportionalPolicy final : public Policy {
 public:
  explicit VelocityProportionalPolicy(const VelocityProportionalParams& params = {},
                                      std::size_t input_size = obs_layout::kSize);

  PolicyKind kind() const override { return PolicyKind::kVelocityProportional; }
  std::size_t input_size() const override { return input_size_; }
  ModulationCommand evaluate(std::span<const double> obs) override;
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<VelocityProportionalPolicy>(*this);
  }

  ModulationCommand command_for(double vx, double vy) const;
  const VelocityProportionalParams& params() const { return params_; }

 private:
  VelocityProportionalParams params_;
  std::size_t input_size_;
};

// Weight file: "CPGW", uint32 little-endian header length, UTF-8 JSON header,
// then little-endian float32 tensors at the offsets listed in the header,
// each with a CRC-32 of its bytes.
inline constexpr int kWeightFormatVersion = 1;

void save_weights(const std::filesystem::path& path, const Policy& policy);
// Any network file; the architecture comes from the header.
std::unique_ptr<Policy> load_policy(const std::filesystem::path& path);
// Loads the file as the given architecture; throws LoadError naming the first
// missing or mis-shaped tensor.
std::unique_ptr<Policy> load_policy(const std::filesystem::path& path, PolicyKind expected);

}  // namespace cpgloco
