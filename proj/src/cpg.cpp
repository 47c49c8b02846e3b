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

#include "cpgloco/cpg.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cpgloco {
namespace {

bool finite(const OscillatorState& o) {
  return std::isfinite(o.r_x) && std::isfinite(o.rdot_x) && std::isfinite(o.r_y) &&
         std::isfinite(o.rdot_y) && std::isfinite(o.theta) && std::isfinite(o.theta_dot);
}

// Transition of e'' = -a e' - a^2/4 e over dt; e = r - mu. Double eigenvalue -a/2.
struct DampedTransition {
  double e00, e01, e10, e11;

  static DampedTransition exact(double a, double dt) {
    const double lambda = 0.5 * a;
    const double decay = std::exp(-lambda * dt);
    // e(t)  = (e0 + (v0 + lambda e0) t) exp(-lambda t)
    // e'(t) = (v0 - lambda (v0 + lambda e0) t) exp(-lambda t)
    return {(1.0 + lambda * dt) * decay, dt * decay, -lambda * lambda * dt * decay,
            (1.0 - lambda * dt) * decay};
  }
};

void advance_amplitude(double& r, double& rdot, double mu, double a, double dt,
                       AmplitudeIntegrator integrator, const DampedTransition& t) {
  if (integrator == AmplitudeIntegrator::kEuler) {
    const double rddot = a * (a / 4.0 * (mu - r) - rdot);
    r += dt * rdot;
    rdot += dt * rddot;
    return;
  }
  const double e = r - mu;
  r = mu + t.e00 * e + t.e01 * rdot;
  rdot = t.e10 * e + t.e11 * rdot;
}

}  // namespace

bool CpgState::finite() const {
  for (const auto& o : legs) {
    if (!cpgloco::finite(o)) return false;
  }
  return true;
}

ModulationCommand ModulationCommand::uniform(double mu_x, double mu_y, double omega_hz) {
  ModulationCommand cmd;
  cmd.mu_x.fill(mu_x);
  cmd.mu_y.fill(mu_y);
  cmd.omega_hz.fill(omega_hz);
  return cmd;
}

ModulationCommand ModulationCommand::clamped() const {
  ModulationCommand out;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    out.mu_x[i] = kMuRange.clamp(mu_x[i]);
    out.mu_y[i] = kMuRange.clamp(mu_y[i]);
    out.omega_hz[i] = kOmegaRangeHz.clamp(omega_hz[i]);
  }
  return out;
}

void CpgNetworkConfig::validate() const {
  if (!(a_x > 0.0) || !(a_y > 0.0)) throw RangeError("convergence factors must be positive");
  if (!(dt > 0.0)) throw RangeError("integration dt must be positive");
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    if (coupling_weights[i][i] != 0.0) throw RangeError("w_ii must be 0");
    if (phase_biases[i][i] != 0.0) throw RangeError("phi_ii must be 0");
    for (std::size_t j = 0; j < kNumLegs; ++j) {
      if (!(coupling_weights[i][j] >= 0.0) || !std::isfinite(coupling_weights[i][j])) {
        throw RangeError("coupling weights must be finite and >= 0");
      }
      const double s = phase_biases[i][j] + phase_biases[j][i];
      if (std::abs(std::sin(0.5 * s)) > 1e-9) {
        throw RangeError("phase biases must be antisymmetric mod 2*pi (phi[" +
                         std::to_string(i) + "][" + std::to_string(j) + "])");
      }
    }
  }
}

CpgState step(const CpgState& state, const ModulationCommand& cmd,
              const CpgNetworkConfig& cfg) {
  if (!state.finite()) throw StateCorruptionError("non-finite CPG state");
  const ModulationCommand c = cmd.clamped();
  const double dt = cfg.dt;
  const auto tx = DampedTransition::exact(cfg.a_x, dt);
  const auto ty = DampedTransition::exact(cfg.a_y, dt);

  CpgState next = state;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const OscillatorState& oi = state.legs[i];
    double coupling = 0.0;
    for (std::size_t j = 0; j < kNumLegs; ++j) {
      const double w = cfg.coupling_weights[i][j];
      if (w == 0.0) continue;
      const OscillatorState& oj = state.legs[j];
      coupling += (oj.r_x + oj.r_y) * w * std::sin(oj.theta - oi.theta - cfg.phase_biases[i][j]);
    }
    const double theta_dot = kTwoPi * c.omega_hz[i] + 0.5 * coupling;

    OscillatorState& o = next.legs[i];
    advance_amplitude(o.r_x, o.rdot_x, c.mu_x[i], cfg.a_x, dt, cfg.amplitude_integrator, tx);
    advance_amplitude(o.r_y, o.rdot_y, c.mu_y[i], cfg.a_y, dt, cfg.amplitude_integrator, ty);
    o.theta = oi.theta + dt * theta_dot;
    o.theta_dot = theta_dot;
  }
  return next;
}

Matrix4 trot_phase_biases() {
  constexpr std::array<double, kNumLegs> offset = {0.0, std::numbers::pi, std::numbers::pi,
                                                   0.0};
  Matrix4 phi{};
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    for (std::size_t j = 0; j < kNumLegs; ++j) phi[i][j] = offset[j] - offset[i];
  }
  return phi;
}

CpgNetworkConfig trot_config(double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw RangeError("trot coupling weight must lie in [0, 1], got " + std::to_string(weight));
  }
  CpgNetworkConfig cfg;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    for (std::size_t j = 0; j < kNumLegs; ++j) cfg.coupling_weights[i][j] = i == j ? 0.0 : weight;
  }
  cfg.phase_biases = trot_phase_biases();
  return cfg;
}

double phase_locking_residual(const CpgState& state, const CpgNetworkConfig& cfg) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    for (std::size_t j = 0; j < kNumLegs; ++j) {
      if (i == j || !(cfg.coupling_weights[i][j] > 0.0)) continue;
      const double d = state.legs[j].theta - state.legs[i].theta - cfg.phase_biases[i][j];
      worst = std::max(worst, std::abs(std::sin(d)));
    }
  }
  return worst;
}

double pattern_residual(const CpgState& state, const Matrix4& phase_biases) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    for (std::size_t j = 0; j < kNumLegs; ++j) {
      if (i == j) continue;
      const double d = state.legs[j].theta - state.legs[i].theta - phase_biases[i][j];
      worst = std::max(worst, std::abs(std::sin(d)));
    }
  }
  return worst;
}

CpgState initial_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  CpgState s;
  for (auto& o : s.legs) o.theta = phase(rng);
  return s;
}

CpgState pattern_state(const Matrix4& phase_biases) {
  CpgState s;
  for (std::size_t i = 0; i < kNumLegs; ++i) s.legs[i].theta = wrap_to_2pi(phase_biases[0][i]);
  return s;
}

}  // namespace cpgloco
