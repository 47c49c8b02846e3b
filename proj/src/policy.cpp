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

#include "cpgloco/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <random>

#include <zlib.h>

#include "json.hpp"

namespace cpgloco {
namespace {

using nlohmann::json;

void apply_activation(Eigen::VectorXf& v, Activation act) {
  switch (act) {
    case Activation::kElu:
      v = v.unaryExpr([](float x) { return x > 0.0f ? x : std::expm1(x); });
      break;
    case Activation::kTanh:
      v = v.array().tanh().matrix();
      break;
    case Activation::kRelu:
      v = v.cwiseMax(0.0f);
      break;
  }
}

void dense_forward(const DenseLayer& layer, const Eigen::VectorXf& in, Eigen::VectorXf& out) {
  out = layer.bias;
  out.noalias() += layer.weight * in;
}

DenseLayer zero_layer(int in, int out) {
  return {Eigen::MatrixXf::Zero(out, in), Eigen::VectorXf::Zero(out)};
}

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
DenseLayer random_layer(int in, int out, std::mt19937_64& rng) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(in));
  std::uniform_real_distribution<float> u(-bound, bound);
  DenseLayer l = zero_layer(in, out);
  for (int r = 0; r < out; ++r) {
    for (int c = 0; c < in; ++c) l.weight(r, c) = u(rng);
  }
  for (int r = 0; r < out; ++r) l.bias(r) = u(rng);
  return l;
}

std::vector<DenseLayer> dense_chain(std::size_t input, const std::vector<int>& hidden, int output,
                                    std::mt19937_64* rng) {
  std::vector<DenseLayer> layers;
  int in = static_cast<int>(input);
  std::vector<int> sizes = hidden;
  sizes.push_back(output);
  for (int out : sizes) {
    layers.push_back(rng ? random_layer(in, out, *rng) : zero_layer(in, out));
    in = out;
  }
  return layers;
}

void check_chain(std::size_t input, const std::vector<DenseLayer>& layers, int output) {
  if (layers.empty()) throw LayoutError("network has no layers");
  Eigen::Index in = static_cast<Eigen::Index>(input);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const DenseLayer& l = layers[k];
    if (l.weight.cols() != in || l.bias.size() != l.weight.rows()) {
      throw LayoutError("dense layer " + std::to_string(k) + " does not match its input");
    }
    if (!l.weight.allFinite() || !l.bias.allFinite()) {
      throw LayoutError("dense layer " + std::to_string(k) + " holds non-finite weights");
    }
    in = l.weight.rows();
  }
  if (in != output) throw LayoutError("network output size must be " + std::to_string(output));
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

// ---------------------------------------------------------------------------
// Weight file encoding.

constexpr char kMagic[4] = {'C', 'P', 'G', 'W'};

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major
};

Tensor to_tensor(const Eigen::MatrixXf& m) {
  Tensor t;
  t.shape = {m.rows(), m.cols()};
  t.data.resize(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) t.data[r * m.cols() + c] = m(r, c);
  }
  return t;
}

Tensor to_tensor(const Eigen::VectorXf& v) {
  Tensor t;
  t.shape = {v.size()};
  t.data.assign(v.data(), v.data() + v.size());
  return t;
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
  return v;
}

void append_le_floats(std::string& out, const std::vector<float>& data) {
  const std::size_t start = out.size();
  out.resize(start + data.size() * 4);
  for (std::size_t k = 0; k < data.size(); ++k) {
    std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(data[k]));
    std::memcpy(out.data() + start + 4 * k, &bits, 4);
  }
}

std::uint32_t crc_of(const char* bytes, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; tensors here are far below 4 GiB.
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes), static_cast<uInt>(n));
  return static_cast<std::uint32_t>(crc);
}

using TensorMap = std::map<std::string, Tensor>;

struct WeightFile {
  json header;
  TensorMap tensors;
};

void add_dense(TensorMap& map, std::vector<std::string>& order, const std::string& prefix,
               const DenseLayer& l) {
  map[prefix + ".weight"] = to_tensor(l.weight);
  map[prefix + ".bias"] = to_tensor(l.bias);
  order.push_back(prefix + ".weight");
  order.push_back(prefix + ".bias");
}

void add_dense_tensors(TensorMap& map, std::vector<std::string>& order,
                       const std::vector<DenseLayer>& layers) {
  for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
    add_dense(map, order, "mlp." + std::to_string(k), layers[k]);
  }
  add_dense(map, order, "head", layers.back());
}

json scaler_json(const ActionScaler& s) {
  return {{"squash", squash_name(s.squash)},
          {"mu_x", {s.mu_x.lo, s.mu_x.hi}},
          {"mu_y", {s.mu_y.lo, s.mu_y.hi}},
          {"omega_hz", {s.omega_hz.lo, s.omega_hz.hi}}};
}

ActionScaler scaler_from_json(const json& j) {
  ActionScaler s;
  if (j.is_null()) return s;
  s.squash = parse_squash(j.value("squash", std::string("tanh")));
  auto range = [&](const char* key, Range def) {
    if (!j.contains(key)) return def;
    return Range{j[key].at(0).get<double>(), j[key].at(1).get<double>()};
  };
  s.mu_x = range("mu_x", s.mu_x);
  s.mu_y = range("mu_y", s.mu_y);
  s.omega_hz = range("omega_hz", s.omega_hz);
  s.validate();
  return s;
}

WeightFile read_weight_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open weight file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw LoadError("not a weight file: " + path.string());
  }
  std::uint32_t header_len = 0;
  std::memcpy(&header_len, bytes.data() + 4, 4);
  header_len = to_le(header_len);
  if (header_len > bytes.size() - 8) throw LoadError("weight file header is truncated");

  WeightFile file;
  try {
    file.header = json::parse(bytes.begin() + 8, bytes.begin() + 8 + header_len);
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed weight file header: ") + e.what());
  }
  if (file.header.value("format", std::string()) != "cpgloco-weights") {
    throw LoadError("weight file header has the wrong format tag");
  }
  if (file.header.value("version", 0) != kWeightFormatVersion) {
    throw LoadError("unsupported weight file version");
  }

  const std::size_t data_start = 8 + header_len;
  const std::size_t data_size = bytes.size() - data_start;
  try {
    for (const json& t : file.header.at("tensors")) {
      const std::string name = t.at("name").get<std::string>();
      Tensor tensor;
      tensor.shape = t.at("shape").get<std::vector<std::int64_t>>();
      std::size_t count = 1;
      for (std::int64_t d : tensor.shape) {
        if (d < 0) throw LoadError("negative dimension in tensor " + name, name);
        count *= static_cast<std::size_t>(d);
      }
      const std::size_t offset = t.at("offset").get<std::size_t>();
      if (offset > data_size || count * 4 > data_size - offset) {
        throw LoadError("tensor " + name + " is truncated", name);
      }
      const char* src = bytes.data() + data_start + offset;
      if (crc_of(src, count * 4) != t.at("crc32").get<std::uint32_t>()) {
        throw LoadError("checksum mismatch in tensor " + name, name);
      }
      tensor.data.resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, src + 4 * k, 4);
        tensor.data[k] = std::bit_cast<float>(to_le(bits));
      }
      file.tensors.emplace(name, std::move(tensor));
    }
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed tensor table: ") + e.what());
  }
  return file;
}

const Tensor& require(const TensorMap& map, const std::string& name) {
  auto it = map.find(name);
  if (it == map.end()) throw LoadError("weight file lacks tensor " + name, name);
  return it->second;
}

Eigen::MatrixXf matrix_of(const TensorMap& map, const std::string& name, Eigen::Index rows,
                          Eigen::Index cols) {
  const Tensor& t = require(map, name);
  if (t.shape.size() != 2 || (rows >= 0 && t.shape[0] != rows) ||
      (cols >= 0 && t.shape[1] != cols)) {
    throw LoadError("tensor " + name + " has the wrong shape", name);
  }
  Eigen::MatrixXf m(t.shape[0], t.shape[1]);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = t.data[r * m.cols() + c];
  }
  if (!m.allFinite()) throw LoadError("tensor " + name + " holds non-finite values", name);
  return m;
}

Eigen::VectorXf vector_of(const TensorMap& map, const std::string& name, Eigen::Index size) {
  const Tensor& t = require(map, name);
  if (t.shape.size() != 1 || t.shape[0] != size) {
    throw LoadError("tensor " + name + " has the wrong shape", name);
  }
  Eigen::VectorXf v = Eigen::Map<const Eigen::VectorXf>(t.data.data(), size);
  if (!v.allFinite()) throw LoadError("tensor " + name + " holds non-finite values", name);
  return v;
}

DenseLayer dense_of(const TensorMap& map, const std::string& prefix, Eigen::Index in) {
  DenseLayer l;
  l.weight = matrix_of(map, prefix + ".weight", -1, in);
  l.bias = vector_of(map, prefix + ".bias", l.weight.rows());
  return l;
}

std::vector<DenseLayer> dense_stack_of(const TensorMap& map, Eigen::Index in, int output) {
  std::vector<DenseLayer> layers;
  for (int k = 0; map.count("mlp." + std::to_string(k) + ".weight"); ++k) {
    layers.push_back(dense_of(map, "mlp." + std::to_string(k), in));
    in = layers.back().weight.rows();
  }
  layers.push_back(dense_of(map, "head", in));
  if (layers.back().weight.rows() != output) {
    throw LoadError("tensor head.weight has the wrong shape", "head.weight");
  }
  return layers;
}

}  // namespace

const char* squash_name(Squash s) { return s == Squash::kTanh ? "tanh" : "clamp"; }

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kElu:
      return "elu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kRelu:
      return "relu";
  }
  return "elu";
}

Squash parse_squash(const std::string& name) {
  if (name == "tanh") return Squash::kTanh;
  if (name == "clamp") return Squash::kClamp;
  throw SpecError("unknown output squashing '" + name + "'");
}

Activation parse_activation(const std::string& name) {
  if (name == "elu") return Activation::kElu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw SpecError("unknown activation '" + name + "'");
}

const char* policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::kMlp:
      return "mlp";
    case PolicyKind::kLstm:
      return "lstm";
    case PolicyKind::kConstant:
      return "constant";
    case PolicyKind::kVelocityProportional:
      return "vprop";
  }
  return "mlp";
}

void ActionScaler::validate() const {
  for (const Range* r : {&mu_x, &mu_y, &omega_hz}) {
    if (!(r->lo < r->hi)) throw RangeError("action range requires lo < hi");
  }
}

ModulationCommand ActionScaler::from_raw(std::span<const float> raw) const {
  if (raw.size() != 12) throw LayoutError("policy output must hold 12 channels");
  ActionVector a{};
  for (std::size_t k = 0; k < 12; ++k) {
    const double x = raw[k];
    a[k] = squash == Squash::kTanh ? std::tanh(x) : x;
  }
  return from_normalized(a);
}

ModulationCommand ActionScaler::from_normalized(const ActionVector& a) const {
  auto map = [](double v, const Range& r) {
    if (!std::isfinite(v)) v = 0.0;
    v = std::clamp(v, -1.0, 1.0);
    return r.clamp(r.lo + 0.5 * (v + 1.0) * (r.hi - r.lo));
  };
  ModulationCommand cmd;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    cmd.mu_x[i] = map(a[i], mu_x);
    cmd.mu_y[i] = map(a[kNumLegs + i], mu_y);
    cmd.omega_hz[i] = map(a[2 * kNumLegs + i], omega_hz);
  }
  return cmd;
}

ActionVector ActionScaler::normalize(const ModulationCommand& cmd) const {
  auto inv = [](double v, const Range& r) {
    return std::clamp(2.0 * (r.clamp(v) - r.lo) / (r.hi - r.lo) - 1.0, -1.0, 1.0);
  };
  ActionVector a{};
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    a[i] = inv(cmd.mu_x[i], mu_x);
    a[kNumLegs + i] = inv(cmd.mu_y[i], mu_y);
    a[2 * kNumLegs + i] = inv(cmd.omega_hz[i], omega_hz);
  }
  return a;
}

void Policy::check_input(std::span<const double> obs) const {
  if (obs.size() != input_size()) {
    throw LayoutError("observation has " + std::to_string(obs.size()) +
                      " entries, policy expects " + std::to_string(input_size()));
  }
}

// ---------------------------------------------------------------------------

MlpPolicy::MlpPolicy(std::vector<DenseLayer> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation) {
  if (layers_.empty()) throw LayoutError("network has no layers");
  check_chain(layers_.front().weight.cols(), layers_, 12);
  in_.resize(layers_.front().weight.cols());
}

MlpPolicy MlpPolicy::zeros(std::size_t input_size, const std::vector<int>& hidden,
                           int output_size) {
  return MlpPolicy(dense_chain(input_size, hidden, output_size, nullptr));
}

MlpPolicy MlpPolicy::random(std::size_t input_size, std::uint64_t seed,
                            const std::vector<int>& hidden, int output_size) {
  std::mt19937_64 rng(seed);
  return MlpPolicy(dense_chain(input_size, hidden, output_size, &rng));
}

ModulationCommand MlpPolicy::evaluate(std::span<const double> obs) {
  check_input(obs);
  for (std::size_t k = 0; k < obs.size(); ++k) in_[k] = static_cast<float>(obs[k]);
  const Eigen::VectorXf* x = &in_;
  for (std::size_t k = 0; k + 1 < layers_.size(); ++k) {
    Eigen::VectorXf& y = (k % 2 == 0) ? a_ : b_;
    dense_forward(layers_[k], *x, y);
    apply_activation(y, activation_);
    x = &y;
  }
  dense_forward(layers_.back(), *x, out_);
  return scaler_.from_raw({out_.data(), static_cast<std::size_t>(out_.size())});
}

LstmPolicy::LstmPolicy(LstmLayer lstm, std::vector<DenseLayer> dense, Activation activation)
    : lstm_(std::move(lstm)), dense_(std::move(dense)), activation_(activation) {
  const Eigen::Index h = lstm_.weight_hh.cols();
  if (h <= 0 || lstm_.weight_hh.rows() != 4 * h || lstm_.weight_ih.rows() != 4 * h ||
      lstm_.bias_ih.size() != 4 * h || lstm_.bias_hh.size() != 4 * h) {
    throw LayoutError("recurrent layer tensors are inconsistent");
  }
  if (!lstm_.weight_ih.allFinite() || !lstm_.weight_hh.allFinite() ||
      !lstm_.bias_ih.allFinite() || !lstm_.bias_hh.allFinite()) {
    throw LayoutError("recurrent layer holds non-finite weights");
  }
  check_chain(static_cast<std::size_t>(h), dense_, 12);
  in_.resize(lstm_.weight_ih.cols());
  reset();
}

LstmPolicy LstmPolicy::zeros(std::size_t input_size, int hidden_units,
                             const std::vector<int>& dense, int output_size) {
  const Eigen::Index h = hidden_units;
  LstmLayer l{Eigen::MatrixXf::Zero(4 * h, static_cast<Eigen::Index>(input_size)),
              Eigen::MatrixXf::Zero(4 * h, h), Eigen::VectorXf::Zero(4 * h),
              Eigen::VectorXf::Zero(4 * h)};
  return LstmPolicy(std::move(l), dense_chain(h, dense, output_size, nullptr));
}

LstmPolicy LstmPolicy::random(std::size_t input_size, std::uint64_t seed, int hidden_units,
                              const std::vector<int>& dense, int output_size) {
  std::mt19937_64 rng(seed);
  const int h = hidden_units;
  const float bound = 1.0f / std::sqrt(static_cast<float>(h));
  std::uniform_real_distribution<float> u(-bound, bound);
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXf m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
    }
    return m;
  };
  LstmLayer l;
  l.weight_ih = fill(4 * h, static_cast<Eigen::Index>(input_size));
  l.weight_hh = fill(4 * h, h);
  l.bias_ih = fill(4 * h, 1);
  l.bias_hh = fill(4 * h, 1);
  return LstmPolicy(std::move(l), dense_chain(h, dense, output_size, &rng));
}

void LstmPolicy::reset() {
  h_ = Eigen::VectorXf::Zero(lstm_.weight_hh.cols());
  c_ = Eigen::VectorXf::Zero(lstm_.weight_hh.cols());
}

ModulationCommand LstmPolicy::evaluate(std::span<const double> obs) {
  check_input(obs);
  for (std::size_t k = 0; k < obs.size(); ++k) in_[k] = static_cast<float>(obs[k]);
  const Eigen::Index h = h_.size();
  gates_ = lstm_.bias_ih + lstm_.bias_hh;
  gates_.noalias() += lstm_.weight_ih * in_;
  gates_.noalias() += lstm_.weight_hh * h_;
  for (Eigen::Index k = 0; k < h; ++k) {
    const float ig = sigmoid(gates_[k]);
    const float fg = sigmoid(gates_[h + k]);
    const float gg = std::tanh(gates_[2 * h + k]);
    const float og = sigmoid(gates_[3 * h + k]);
    c_[k] = fg * c_[k] + ig * gg;
    h_[k] = og * std::tanh(c_[k]);
  }
  const Eigen::VectorXf* x = &h_;
  for (std::size_t k = 0; k + 1 < dense_.size(); ++k) {
    Eigen::VectorXf& y = (k % 2 == 0) ? a_ : b_;
    dense_forward(dense_[k], *x, y);
    apply_activation(y, activation_);
    x = &y;
  }
  dense_forward(dense_.back(), *x, out_);
  return scaler_.from_raw({out_.data(), static_cast<std::size_t>(out_.size())});
}

// ---------------------------------------------------------------------------

ConstantPolicy::ConstantPolicy(const ModulationCommand& cmd, std::size_t input_size)
    : cmd_(cmd.clamped()), input_size_(input_size) {}

ModulationCommand ConstantPolicy::evaluate(std::span<const double> obs) {
  check_input(obs);
  return cmd_;
}

VelocityProportionalPolicy::VelocityProportionalPolicy(const VelocityProportionalParams& params,
                                                       std::size_t input_size)
    : params_(params), input_size_(input_size) {
  if (!(params_.d_step > 0.0) || !(params_.speed_gain > 0.0)) {
    throw RangeError("velocity-proportional policy needs positive step length and gain");
  }
  if (input_size_ < obs_layout::kCommands) {
    throw LayoutError("velocity-proportional policy reads the command block");
  }
}

ModulationCommand VelocityProportionalPolicy::command_for(double vx, double vy) const {
  const double per_hz = params_.speed_gain * params_.d_step;  // speed per Hz at |f| = 1
  const Range& mu = scaler_.mu_x;
  const double mu_mid = 0.5 * (mu.lo + mu.hi);
  const double half = 0.5 * (mu.hi - mu.lo);

  const double omega = scaler_.omega_hz.clamp(std::max(std::abs(vx), std::abs(vy)) / per_hz);
  double f_x = -1.0;  // standing: amplitude at the bottom of its range
  double f_y = 0.0;
  if (omega > 0.0) {
    f_x = std::clamp(vx / (per_hz * omega), -1.0, 1.0);
    // Lateral stance sweep moves the base opposite to the foot.
    f_y = std::clamp(-vy / (per_hz * omega), -1.0, 1.0);
  }
  ModulationCommand cmd = ModulationCommand::uniform(
      mu.clamp(mu_mid + half * f_x),
      std::abs(vy) > 0.0 ? scaler_.mu_y.clamp(0.5 * (scaler_.mu_y.lo + scaler_.mu_y.hi) +
                                              0.5 * (scaler_.mu_y.hi - scaler_.mu_y.lo) * f_y)
                         : params_.mu_y_neutral,
      omega);
  return cmd.clamped();
}

ModulationCommand VelocityProportionalPolicy::evaluate(std::span<const double> obs) {
  check_input(obs);
  return command_for(obs[obs_layout::kCommandsOffset], obs[obs_layout::kCommandsOffset + 1]);
}

// ---------------------------------------------------------------------------

void save_weights(const std::filesystem::path& path, const Policy& policy) {
  TensorMap map;
  std::vector<std::string> order;
  json header;
  header["format"] = "cpgloco-weights";
  header["version"] = kWeightFormatVersion;
  header["layout_version"] = obs_layout::kVersion;
  header["input_size"] = policy.input_size();
  header["output_size"] = 12;
  header["output"] = squash_name(policy.scaler().squash);
  header["action_ranges"] = scaler_json(policy.scaler());

  if (const auto* mlp = dynamic_cast<const MlpPolicy*>(&policy)) {
    header["architecture"] = "mlp";
    header["activation"] = activation_name(mlp->activation());
    json hidden = json::array();
    for (std::size_t k = 0; k + 1 < mlp->layers().size(); ++k) {
      hidden.push_back(mlp->layers()[k].weight.rows());
    }
    header["hidden"] = hidden;
    add_dense_tensors(map, order, mlp->layers());
  } else if (const auto* lstm = dynamic_cast<const LstmPolicy*>(&policy)) {
    header["architecture"] = "lstm";
    header["activation"] = activation_name(lstm->activation());
    header["lstm_units"] = lstm->hidden_units();
    json hidden = json::array();
    for (std::size_t k = 0; k + 1 < lstm->dense().size(); ++k) {
      hidden.push_back(lstm->dense()[k].weight.rows());
    }
    header["hidden"] = hidden;
    const LstmLayer& l = lstm->lstm();
    for (auto [name, t] : {std::pair{"lstm.weight_ih", to_tensor(l.weight_ih)},
                           std::pair{"lstm.weight_hh", to_tensor(l.weight_hh)},
                           std::pair{"lstm.bias_ih", to_tensor(l.bias_ih)},
                           std::pair{"lstm.bias_hh", to_tensor(l.bias_hh)}}) {
      map[name] = std::move(t);
      order.push_back(name);
    }
    add_dense_tensors(map, order, lstm->dense());
  } else {
    throw SpecError(std::string("policy kind '") + policy_kind_name(policy.kind()) +
                    "' has no weights to save");
  }

  std::string data;
  json tensors = json::array();
  for (const std::string& name : order) {
    const Tensor& t = map.at(name);
    const std::size_t offset = data.size();
    append_le_floats(data, t.data);
    tensors.push_back({{"name", name},
                       {"shape", t.shape},
                       {"dtype", "float32"},
                       {"offset", offset},
                       {"crc32", crc_of(data.data() + offset, data.size() - offset)}});
  }
  header["tensors"] = tensors;

  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write weight file " + path.string());
  const std::uint32_t len = to_le(static_cast<std::uint32_t>(text.size()));
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&len), 4);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing weight file " + path.string());
}

std::unique_ptr<Policy> load_policy(const std::filesystem::path& path) {
  WeightFile file = read_weight_file(path);
  const std::string arch = file.header.value("architecture", std::string());
  if (arch == "mlp") return load_policy(path, PolicyKind::kMlp);
  if (arch == "lstm") return load_policy(path, PolicyKind::kLstm);
  throw LoadError("weight file names unknown architecture '" + arch + "'");
}

std::unique_ptr<Policy> load_policy(const std::filesystem::path& path, PolicyKind expected) {
  WeightFile file = read_weight_file(path);
  const TensorMap& map = file.tensors;
  Activation act = Activation::kElu;
  ActionScaler scaler;
  try {
    act = parse_activation(file.header.value("activation", std::string("elu")));
    scaler = scaler_from_json(file.header.value("action_ranges", json()));
  } catch (const Error& e) {
    throw LoadError(std::string("invalid weight file header: ") + e.what());
  } catch (const json::exception& e) {
    throw LoadError(std::string("invalid weight file header: ") + e.what());
  }
  const int output = file.header.value("output_size", 12);

  std::unique_ptr<Policy> policy;
  try {
    if (expected == PolicyKind::kMlp) {
      const Tensor& first = require(map, "mlp.0.weight");
      const Eigen::Index in = first.shape.size() == 2 ? first.shape[1] : -1;
      if (in <= 0) throw LoadError("tensor mlp.0.weight has the wrong shape", "mlp.0.weight");
      policy = std::make_unique<MlpPolicy>(dense_stack_of(map, in, output), act);
    } else if (expected == PolicyKind::kLstm) {
      LstmLayer l;
      l.weight_hh = matrix_of(map, "lstm.weight_hh", -1, -1);
      const Eigen::Index h = l.weight_hh.cols();
      if (l.weight_hh.rows() != 4 * h) {
        throw LoadError("tensor lstm.weight_hh has the wrong shape", "lstm.weight_hh");
      }
      l.weight_ih = matrix_of(map, "lstm.weight_ih", 4 * h, -1);
      l.bias_ih = vector_of(map, "lstm.bias_ih", 4 * h);
      l.bias_hh = vector_of(map, "lstm.bias_hh", 4 * h);
      policy = std::make_unique<LstmPolicy>(std::move(l), dense_stack_of(map, h, output), act);
    } else {
      throw LoadError(std::string("policy kind '") + policy_kind_name(expected) +
                      "' is not loaded from weights");
    }
  } catch (const LayoutError& e) {
    throw LoadError(std::string("weight file is inconsistent: ") + e.what());
  }
  const std::size_t declared = file.header.value("input_size", policy->input_size());
  if (declared != policy->input_size()) {
    throw LoadError("header input size disagrees with the first layer");
  }
  policy->set_scaler(scaler);
  return policy;
}

}  // namespace cpgloco
