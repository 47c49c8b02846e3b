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

// Amplitude-controlled phase oscillator network, one oscillator per leg.
//
// Per leg i the network carries two critically damped amplitudes and a phase:
//
//   r_x'' = a_x * (a_x / 4 * (mu_x - r_x) - r_x')
//   r_y'' = a_y * (a_y / 4 * (mu_y - r_y) - r_y')
//   theta' = 2*pi*omega + 1/2 * sum_j (r_x_j + r_y_j) * w_ij * sin(theta_j - theta_i - phi_ij)
//
// omega is commanded in Hz. theta is stored unwrapped.

#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "cpgloco/common.hpp"

namespace cpgloco {

using Matrix4 = std::array<std::array<double, kNumLegs>, kNumLegs>;

struct OscillatorState {
  double r_x = 1.0;
  double rdot_x = 0.0;
  double r_y = 1.0;
  double rdot_y = 0.0;
  double theta = 0.0;      // rad, unwrapped
  double theta_dot = 0.0;  // rad/s, derivative used by the most recent step

  friend bool operator==(const OscillatorState&, const OscillatorState&) = default;
};

struct CpgState {
  std::array<OscillatorState, kNumLegs> legs{};

  double wrapped_phase(std::size_t leg) const { return wrap_to_2pi(legs[leg].theta); }
  bool finite() const;

  friend bool operator==(const CpgState&, const CpgState&) = default;
};

inline constexpr Range kMuRange{1.0, 2.0};
inline constexpr Range kOmegaRangeHz{0.0, 4.5};

struct ModulationCommand {
  std::array<double, kNumLegs> mu_x{1.5, 1.5, 1.5, 1.5};
  std::array<double, kNumLegs> mu_y{1.5, 1.5, 1.5, 1.5};
  std::array<double, kNumLegs> omega_hz{0.0, 0.0, 0.0, 0.0};

  static ModulationCommand uniform(double mu_x, double mu_y, double omega_hz);
  ModulationCommand clamped() const;

  friend bool operator==(const ModulationCommand&, const ModulationCommand&) = default;
};

enum class AmplitudeIntegrator {
  // Exact zero-order-hold transition of the linear amplitude dynamics.
  kExact,
  // Forward Euler on (r, r').
  kEuler,
};

struct CpgNetworkConfig {
  double a_x = 50.0;
  double a_y = 50.0;
  Matrix4 coupling_weights{};
  Matrix4 phase_biases{};
  double dt = 0.001;
  AmplitudeIntegrator amplitude_integrator = AmplitudeIntegrator::kExact;

  // Throws RangeError on negative weights, nonzero diagonals, phase biases that
  // are not antisymmetric mod 2*pi, or non-positive a / dt.
  void validate() const;
};

// Advances the network by cfg.dt. The command is clamped to the action ranges.
// Throws StateCorruptionError when the input state is not finite.
CpgState step(const CpgState& state, const ModulationCommand& cmd,
              const CpgNetworkConfig& cfg);

// Trot coupling: diagonal pairs in phase, lateral and fore/hind neighbours in
// antiphase. Uniform weight on every off-diagonal entry.
CpgNetworkConfig trot_config(double weight);

// Phase biases of the trot pattern (FL, HR at 0; FR, HL at pi).
Matrix4 trot_phase_biases();

// max over ordered pairs (i, j) with w_ij > 0 of |sin(theta_j - theta_i - phi_ij)|.
// 0 when no pair is coupled.
double phase_locking_residual(const CpgState& state, const CpgNetworkConfig& cfg);

// Same measure over every ordered pair i != j regardless of coupling, i.e. the
// distance of the current phases from the bias pattern.
double pattern_residual(const CpgState& state, const Matrix4& phase_biases);

// r = 1, r' = 0, theta_i ~ U[0, 2*pi).
CpgState initial_state(std::mt19937_64& rng);

// Unit amplitudes with theta_i = phi_0i, the phase pattern the biases encode.
CpgState pattern_state(const Matrix4& phase_biases);

}  // namespace cpgloco
