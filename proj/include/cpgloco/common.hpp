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

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace cpgloco {

enum class Leg : std::size_t { kFL = 0, kFR = 1, kHL = 2, kHR = 3 };

inline constexpr std::size_t kNumLegs = 4;
inline constexpr std::size_t kJointsPerLeg = 3;
inline constexpr std::size_t kNumJoints = kNumLegs * kJointsPerLeg;
inline constexpr std::array<const char*, kNumLegs> kLegNames = {"FL", "FR", "HL",
                                                                "HR"};
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kGravity = 9.81;

// +1 for left legs, -1 for right legs.
constexpr int lateral_sign(std::size_t leg) { return (leg % 2 == 0) ? 1 : -1; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

using JointVector = std::array<double, kNumJoints>;

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

// Wraps an angle to [0, 2*pi).
inline double wrap_to_2pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

// Wraps an angle to (-pi, pi].
inline double wrap_to_pi(double angle) {
  double w = wrap_to_2pi(angle);
  return w > std::numbers::pi ? w - kTwoPi : w;
}

enum class ErrorCode {
  kInvalidArgument = 1,
  kRange = 2,
  kStateCorruption = 3,
  kWorkspace = 4,
  kLayout = 5,
  kLoad = 6,
  kSpec = 7,
  kIo = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorCode::kRange, what) {}
};

class StateCorruptionError : public Error {
 public:
  explicit StateCorruptionError(const std::string& what)
      : Error(ErrorCode::kStateCorruption, what) {}
};

class LayoutError : public Error {
 public:
  explicit LayoutError(const std::string& what) : Error(ErrorCode::kLayout, what) {}
};

class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::string tensor = {})
      : Error(ErrorCode::kLoad, what), tensor_(std::move(tensor)) {}
  // Name of the offending tensor, empty for file-level failures.
  const std::string& tensor() const noexcept { return tensor_; }

 private:
  std::string tensor_;
};

class SpecError : public Error {
 public:
  explicit SpecError(const std::string& what) : Error(ErrorCode::kSpec, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

}  // namespace cpgloco
