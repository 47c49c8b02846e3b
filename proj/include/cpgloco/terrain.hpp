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

// Box worlds on a regular height grid, plus the exteroceptive height sampler.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cpgloco/common.hpp"

namespace cpgloco {

// Axis-aligned box standing on the ground plane.
struct Box {
  double cx = 0.0;
  double cy = 0.0;
  double width = 1.0;   // along x
  double length = 1.0;  // along y
  double height = 0.1;

  bool covers(double x, double y) const {
    return x >= cx - 0.5 * width && x <= cx + 0.5 * width && y >= cy - 0.5 * length &&
           y <= cy + 0.5 * length;
  }
};

// Regular grid of cell heights. Queries use the nearest cell (the cell that
// contains the point); points outside the grid read the nearest edge cell.
class Heightmap {
 public:
  Heightmap() = default;
  Heightmap(double resolution, double origin_x, double origin_y, int nx, int ny);

  double height_at(double x, double y) const;
  // Raises every cell whose center lies inside the box to at least its height.
  void add_box(const Box& box);

  double resolution() const { return resolution_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double extent_x() const { return nx_ * resolution_; }
  double extent_y() const { return ny_ * resolution_; }
  double cell(int ix, int iy) const { return heights_[static_cast<std::size_t>(iy) * nx_ + ix]; }
  double cell_center_x(int ix) const { return origin_x_ + (ix + 0.5) * resolution_; }
  double cell_center_y(int iy) const { return origin_y_ + (iy + 0.5) * resolution_; }
  const std::vector<double>& heights() const { return heights_; }

 private:
  double resolution_ = 0.05;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> heights_;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct GoalRegion {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

// A heightmap together with the boxes it was rasterized from, a spawn pose and
// an optional goal region. This is the unit saved to and loaded from world files.
struct World {
  std::string kind = "flat";
  Heightmap map;
  std::vector<Box> boxes;
  Pose2 spawn;
  std::optional<GoalRegion> goal;

  // Rebuilds `map` from `boxes` on a grid with the given geometry.
  static World from_boxes(std::string kind, double resolution, double origin_x,
                          double origin_y, int nx, int ny, std::vector<Box> boxes);

  std::string to_json() const;
  static World from_json(const std::string& text);
  void save(const std::string& path) const;
  static World load(const std::string& path);
};

inline constexpr double kDefaultMapResolution = 0.05;

World flat_world(double arena_size = 40.0);

struct TerrainOptions {
  double resolution = kDefaultMapResolution;
  double boxes_per_m2 = 0.05;  // box density at difficulty 1
  double spawn_radius = 1.0;   // obstacle-free disc around the origin
  Range width{0.4, 2.0};
  Range height{0.1, 1.0};
};

// difficulty 0 is flat; box count and the upper end of the height range grow
// linearly with difficulty. Arena centered on the origin.
World generate_terrain(std::uint64_t seed, double difficulty, double arena_size,
                       const TerrainOptions& options = {});

struct CorridorOptions {
  double length = 14.0;  // along +x from the spawn
  double behind = 2.0;   // free floor behind the spawn
  double wall_height = 1.0;
  double wall_thickness = 0.3;
  double resolution = kDefaultMapResolution;
};

// Two walls along x whose inner faces are `width` apart, centered on y = 0.
World corridor_world(double width, const CorridorOptions& options = {});

struct NavigationOptions {
  double width = 3.0;           // corridor width
  double length = 14.0;
  double wall_height = 1.0;
  double wall_thickness = 0.3;
  double baffle_thickness = 0.4;
  double gap = 1.0;             // free passage left by each baffle
  double first_baffle_x = 3.0;
  double second_baffle_x = 6.5;
  double obstacle_x = 10.0;
  double obstacle_size = 1.0;
  double jitter = 0.25;         // seeded perturbation of baffle / obstacle x
  double resolution = kDefaultMapResolution;
};

// Corridor with a right-side baffle (pass on the left), a left-side baffle
// (pass on the right) and a free-standing central obstacle before the goal.
World navigation_world(std::uint64_t seed, const NavigationOptions& options = {});

struct BasePose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
};

struct HeightGridOptions {
  int rows = 17;                // along body x
  int cols = 11;                // along body y
  double spacing = 0.1;
  double forward_offset = 0.3;  // grid center ahead of the base along body x
  // Readings are terrain - (base.z - nominal_height): 0 on flat ground with the
  // base standing at its nominal height.
  double nominal_height = 0.3;

  int count() const { return rows * cols; }
};

inline constexpr int kHeightSamples = 17 * 11;

// Row-major over body x (back to front), then body y (right to left).
std::vector<double> sample_height_grid(const Heightmap& map, const BasePose& base,
                                       double noise_std, std::mt19937_64& rng,
                                       const HeightGridOptions& options = {});

// Body-frame offset of sample k.
std::pair<double, double> height_grid_offset(int k, const HeightGridOptions& options = {});

}  // namespace cpgloco
