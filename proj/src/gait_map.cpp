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

#include "cpgloco/gait_map.hpp"

#include <cmath>
#include <numbers>

namespace cpgloco {

void GaitShapeParams::validate() const {
  if (!(d_step > 0.0)) throw RangeError("d_step must be positive");
  if (!(g_p >= 0.0) || !(h > g_p)) throw RangeError("need h > g_p >= 0");
  if (!(g_c >= 0.0)) throw RangeError("g_c must be >= 0");
  if (!(mu_max > mu_min)) throw RangeError("mu_max must exceed mu_min");
}

double normalize_amplitude(double r, const GaitShapeParams& params) {
  return 2.0 * (r - params.mu_min) / (params.mu_max - params.mu_min) - 1.0;
}

Vec3 foot_target(const OscillatorState& osc, const GaitShapeParams& params) {
  const double c = std::cos(osc.theta);
  const double s = std::sin(osc.theta);
  Vec3 p;
  p.x = -params.d_step * normalize_amplitude(osc.r_x, params) * c;
  p.y = params.d_step * normalize_amplitude(osc.r_y, params) * c;
  p.z = s > 0.0 ? -params.h + params.g_c * s : -params.h + params.g_p * s;
  return p;
}

FootTargets foot_targets(const CpgState& state, const GaitShapeParams& params) {
  FootTargets out;
  for (std::size_t i = 0; i < kNumLegs; ++i) out[i] = foot_target(state.legs[i], params);
  return out;
}

bool swing_flag(double theta) {
  const double phase = wrap_to_2pi(theta);
  return phase > 0.0 && phase < std::numbers::pi;
}

}  // namespace cpgloco
