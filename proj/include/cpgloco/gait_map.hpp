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

// Maps oscillator states to Cartesian foot targets in each leg frame
// (x forward, y left, z up, origin at the nominal foot column below the hip).

#pragma once

#include <array>

#include "cpgloco/common.hpp"
#include "cpgloco/cpg.hpp"

namespace cpgloco {

struct GaitShapeParams {
  double d_step = 0.15;  // m, maximum step length
  double h = 0.3;        // m, robot height
  double g_c = 0.05;     // m, max ground clearance in swing
  double g_p = 0.01;     // m, max ground penetration in stance
  double mu_min = 1.0;
  double mu_max = 2.0;

  void validate() const;
};

using FootTargets = std::array<Vec3, kNumLegs>;

// Maps r in [mu_min, mu_max] onto [-1, 1].
double normalize_amplitude(double r, const GaitShapeParams& params);

Vec3 foot_target(const OscillatorState& osc, const GaitShapeParams& params);
FootTargets foot_targets(const CpgState& state, const GaitShapeParams& params);

// True iff the wrapped phase lies strictly inside (0, pi). theta = 0 and
// theta = pi belong to stance.
bool swing_flag(double theta);

}  // namespace cpgloco
