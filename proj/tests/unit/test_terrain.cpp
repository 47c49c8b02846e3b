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


#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "cpgloco/terrain.hpp"
#include "doctest.h"

using namespace cpgloco;

namespace {

// Planar reachability over map cells for a disc robot of the given radius.
class CellPlanner {
 public:
  CellPlanner(const Heightmap& map, double robot_radius, double obstacle_height = 0.05)
      : map_(map), blocked_(static_cast<std::size_t>(map.nx()) * map.ny(), false) {
    const int reach = static_cast<int>(std::ceil(robot_radius / map.resolution()));
    for (int iy = 0; iy < map.ny(); ++iy) {
      for (int ix = 0; ix < map.nx(); ++ix) {
        if (map.cell(ix, iy) <= obstacle_height) continue;
        for (int dy = -reach; dy <= reach; ++dy) {
          for (int dx = -reach; dx <= reach; ++dx) {
            if (std::hypot(dx, dy) * map.resolution() > robot_radius) continue;
            const int x = ix + dx;
            const int y = iy + dy;
            if (x < 0 || y < 0 || x >= map.nx() || y >= map.ny()) continue;
            blocked_[index(x, y)] = true;
          }
        }
      }
    }
  }

  // True when a 4-connected free path joins the start cell to any goal cell,
  // using only cells whose centers satisfy `allowed`.
  template <typename Allowed>
  bool connected(double sx, double sy, const GoalRegion& goal, Allowed allowed) const {
    const int s_ix = static_cast<int>(std::floor((sx - map_.origin_x()) / map_.resolution()));
    const int s_iy = static_cast<int>(std::floor((sy - map_.origin_y()) / map_.resolution()));
    std::vector<bool> seen(blocked_.size(), false);
    std::deque<std::pair<int, int>> open;
    auto push = [&](int x, int y) {
      if (x < 0 || y < 0 || x >= map_.nx() || y >= map_.ny()) return;
      const std::size_t k = index(x, y);
      if (seen[k] || blocked_[k]) return;
      if (!allowed(map_.cell_center_x(x), map_.cell_center_y(y))) return;
      seen[k] = true;
      open.emplace_back(x, y);
    };
    push(s_ix, s_iy);
    while (!open.empty()) {
      const auto [x, y] = open.front();
      open.pop_front();
      const double cx = map_.cell_center_x(x);
      const double cy = map_.cell_center_y(y);
      if (cx >= goal.x_min && cx <= goal.x_max && cy >= goal.y_min && cy <= goal.y_max) {
        return true;
      }
      push(x + 1, y);
      push(x - 1, y);
      push(x, y + 1);
      push(x, y - 1);
    }
    return false;
  }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * map_.nx() + x;
  }

  const Heightmap& map_;
  std::vector<bool> blocked_;
};

std::vector<double> sample(const Heightmap& map, const BasePose& base,
                           const HeightGridOptions& opts = {}) {
  std::mt19937_64 rng(0);
  return sample_height_grid(map, base, 0.0, rng, opts);
}

}  // namespace

TEST_CASE("heightmap queries use the containing cell and clamp at the edges") {
  Heightmap map(0.1, -1.0, -1.0, 20, 20);
  map.add_box({0.5, 0.5, 0.2, 0.2, 0.4});
  CHECK(map.height_at(0.5, 0.5) == 0.4);
  CHECK(map.height_at(0.45, 0.55) == 0.4);
  CHECK(map.height_at(0.0, 0.0) == 0.0);
  CHECK(map.height_at(-5.0, 0.0) == 0.0);
  CHECK(map.height_at(0.55, 50.0) == map.height_at(0.55, 0.95));
  CHECK(map.extent_x() == doctest::Approx(2.0));
  CHECK_THROWS_AS(Heightmap(0.0, 0.0, 0.0, 4, 4), RangeError);
}

TEST_CASE("overlapping boxes keep the taller height") {
  World w = World::from_boxes("file", 0.05, -2.0, -2.0, 80, 80,
                              {{0.0, 0.0, 1.0, 1.0, 0.2}, {0.2, 0.0, 0.4, 0.4, 0.6}});
  CHECK(w.map.height_at(0.225, 0.025) == 0.6);
  CHECK(w.map.height_at(-0.375, 0.025) == 0.2);
}

TEST_CASE("generated terrain over the difficulty range") {
  SUBCASE("difficulty zero is flat") {
    const World w = generate_terrain(3, 0.0, 20.0);
    CHECK(w.boxes.empty());
    for (double h : w.map.heights()) REQUIRE(h == 0.0);
  }
  SUBCASE("full difficulty respects the box ranges") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const World w = generate_terrain(seed, 1.0, 20.0);
      REQUIRE_FALSE(w.boxes.empty());
      for (const Box& b : w.boxes) {
        REQUIRE(b.width >= 0.4);
        REQUIRE(b.width <= 2.0);
        REQUIRE(b.length >= 0.4);
        REQUIRE(b.length <= 2.0);
        REQUIRE(b.height >= 0.1);
        REQUIRE(b.height <= 1.0);
      }
    }
  }
  SUBCASE("count and height ceiling scale with difficulty") {
    const World half = generate_terrain(9, 0.5, 20.0);
    const World full = generate_terrain(9, 1.0, 20.0);
    CHECK(half.boxes.size() == 10);
    CHECK(full.boxes.size() == 20);
    for (const Box& b : half.boxes) CHECK(b.height <= 0.55);
  }
  SUBCASE("same seed gives the same map") {
    const World a = generate_terrain(42, 0.8, 20.0);
    const World b = generate_terrain(42, 0.8, 20.0);
    CHECK(a.map.heights() == b.map.heights());
    CHECK(generate_terrain(43, 0.8, 20.0).map.heights() != a.map.heights());
  }
  SUBCASE("spawn disc stays free") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const World w = generate_terrain(seed, 1.0, 20.0);
      for (int k = 0; k < 360; ++k) {
        for (double r : {0.0, 0.3, 0.6, 0.9}) {
          const double a = kTwoPi * k / 360.0;
          REQUIRE(w.map.height_at(r * std::cos(a), r * std::sin(a)) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("corridor walls bound a flat floor of the requested width") {
  const World w = corridor_world(1.7);
  const Heightmap& m = w.map;
  for (int ix = 0; ix < m.nx(); ix += 17) {
    int free_cells = 0;
    double lo = 1e9;
    double hi = -1e9;
    for (int iy = 0; iy < m.ny(); ++iy) {
      const double y = m.cell_center_y(iy);
      if (std::abs(y) < 0.85 + 0.3) {
        if (m.cell(ix, iy) == 0.0) {
          ++free_cells;
          lo = std::min(lo, y);
          hi = std::max(hi, y);
        } else {
          REQUIRE(m.cell(ix, iy) >= 1.0);
        }
      }
    }
    // Inner faces sit half a cell beyond the extreme free cell centers.
    CHECK(free_cells == 34);
    CHECK(hi - lo + m.resolution() == doctest::Approx(1.7).epsilon(1e-9));
  }
  for (double x = -1.5; x < 13.5; x += 0.1) REQUIRE(m.height_at(x, 0.0) == 0.0);
  CHECK(w.goal.has_value());
  CHECK_THROWS_AS(corridor_world(0.3), RangeError);
}

TEST_CASE("navigation world forces a left and then a right turn") {
  NavigationOptions opts;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const World w = navigation_world(seed, opts);
    REQUIRE(w.goal.has_value());
    const CellPlanner planner(w.map, 0.3);
    auto anywhere = [](double, double) { return true; };
    CHECK(planner.connected(w.spawn.x, w.spawn.y, *w.goal, anywhere));
    // Forbidding the left half of the corridor (or the right) disconnects it.
    CHECK_FALSE(planner.connected(w.spawn.x, w.spawn.y, *w.goal,
                                  [](double, double y) { return y < 0.45; }));
    CHECK_FALSE(planner.connected(w.spawn.x, w.spawn.y, *w.goal,
                                  [](double, double y) { return y > -0.45; }));
    // Floor between obstacles is flat; obstacles are full height.
    for (double h : w.map.heights()) REQUIRE((h == 0.0 || h >= opts.wall_height));
  }
  CHECK(navigation_world(1).map.heights() == navigation_world(1).map.heights());
}

TEST_CASE("world files round-trip") {
  const World w = navigation_world(4);
  const auto path = std::filesystem::temp_directory_path() / "cpgloco_world_roundtrip.json";
  w.save(path.string());
  const World back = World::load(path.string());
  std::filesystem::remove(path);
  CHECK(back.kind == w.kind);
  CHECK(back.map.heights() == w.map.heights());
  CHECK(back.map.nx() == w.map.nx());
  CHECK(back.boxes.size() == w.boxes.size());
  REQUIRE(back.goal.has_value());
  CHECK(back.goal->x_min == w.goal->x_min);

  CHECK_THROWS_AS(World::from_json("{"), SpecError);
  CHECK_THROWS_AS(World::from_json(R"({"format":"other"})"), SpecError);
  CHECK_THROWS_AS(World::from_json(
                      R"({"format":"cpgloco-world","resolution":0.05,"origin":[0,0],)"
                      R"("cells":[4,4],"boxes":[{"center":[0,0],"size":[0,1],"height":1}]})"),
                  SpecError);
  CHECK_THROWS_AS(World::load("/nonexistent/world.json"), IoError);
}

TEST_CASE("height grid layout") {
  const HeightGridOptions o;
  CHECK(o.count() == kHeightSamples);
  CHECK(kHeightSamples == 187);
  const auto first = height_grid_offset(0);
  const auto last = height_grid_offset(186);
  CHECK(first.first == doctest::Approx(0.3 - 0.8));
  CHECK(first.second == doctest::Approx(-0.5));
  CHECK(last.first == doctest::Approx(0.3 + 0.8));
  CHECK(last.second == doctest::Approx(0.5));
  const auto next_row = height_grid_offset(11);
  CHECK(next_row.first - first.first == doctest::Approx(0.1));
}

TEST_CASE("flat ground at nominal height reads zero everywhere") {
  const World w = flat_world(10.0);
  const auto h = sample(w.map, {0.4, -0.2, 0.3, 0.7});
  REQUIRE(h.size() == 187);
  for (double v : h) CHECK(v == 0.0);
  // Readings are relative to the base height.
  for (double v : sample(w.map, {0.0, 0.0, 0.35, 0.0})) CHECK(v == doctest::Approx(-0.05));
}

TEST_CASE("a box under part of the grid lifts exactly those samples") {
  const Box box{0.4, 0.05, 0.38, 0.48, 0.3};
  const World w = World::from_boxes("file", 0.05, -5.0, -5.0, 200, 200, {box});
  const BasePose base{0.025, 0.025, 0.3, 0.0};
  const auto h = sample(w.map, base);
  int lifted = 0;
  for (int k = 0; k < kHeightSamples; ++k) {
    const auto [bx, by] = height_grid_offset(k);
    const bool under = box.covers(base.x + bx, base.y + by);
    CHECK(h[static_cast<std::size_t>(k)] == (under ? 0.3 : 0.0));
    lifted += under ? 1 : 0;
  }
  CHECK(lifted == 20);
}

TEST_CASE("sampling is equivariant to translation and point reflection") {
  const std::vector<Box> boxes = {{0.7, 0.2, 0.5, 0.9, 0.25}, {-0.4, -0.3, 0.6, 0.4, 0.6},
                                  {0.1, 0.45, 0.4, 0.4, 0.15}};
  const World w = World::from_boxes("file", 0.05, -4.0, -4.0, 160, 160, boxes);
  const BasePose base{0.025, 0.075, 0.3, 0.0};

  SUBCASE("translating world and base together") {
    const double dx = 1.25;
    const double dy = -0.65;
    std::vector<Box> moved = boxes;
    for (Box& b : moved) {
      b.cx += dx;
      b.cy += dy;
    }
    const World shifted = World::from_boxes("file", 0.05, -4.0 + dx, -4.0 + dy, 160, 160, moved);
    CHECK(sample(shifted.map, {base.x + dx, base.y + dy, base.z, 0.0}) == sample(w.map, base));
  }
  SUBCASE("turning the base around reverses both sample axes") {
    HeightGridOptions centered;
    centered.forward_offset = 0.0;
    const auto ahead = sample(w.map, base, centered);
    BasePose turned = base;
    turned.yaw = std::numbers::pi;
    const auto behind = sample(w.map, turned, centered);
    const int rows = centered.rows;
    const int cols = centered.cols;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        REQUIRE(behind[static_cast<std::size_t>(r * cols + c)] ==
                ahead[static_cast<std::size_t>((rows - 1 - r) * cols + (cols - 1 - c))]);
      }
    }
  }
  SUBCASE("yaw rotates the grid with the body") {
    BasePose left = base;
    left.yaw = std::numbers::pi / 2;
    // Body +x maps to world +y: the front-center sample sits at base + (0, 1.1).
    const auto h = sample(w.map, left);
    CHECK(h[186 - 5] == w.map.height_at(base.x, base.y + 1.1));
  }
}

TEST_CASE("measurement noise has the requested spread and no bias") {
  const World w = flat_world(10.0);
  std::mt19937_64 rng(77);
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  while (n < 100000) {
    const auto h = sample_height_grid(w.map, {0.0, 0.0, 0.3, 0.0}, 0.1, rng);
    for (double v : h) {
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sum_sq / static_cast<double>(n) - mean * mean;
  CHECK(var == doctest::Approx(0.01).epsilon(0.05));
  CHECK(std::abs(mean) < 3 * 0.1 / std::sqrt(static_cast<double>(n)));
  // Single-point average over repeated draws.
  std::mt19937_64 point_rng(78);
  double point_sum = 0.0;
  constexpr int kDraws = 100000;
  HeightGridOptions one;
  one.rows = 1;
  one.cols = 1;
  for (int k = 0; k < kDraws; ++k) {
    point_sum += sample_height_grid(w.map, {0.0, 0.0, 0.3, 0.0}, 0.1, point_rng, one)[0];
  }
  CHECK(std::abs(point_sum / kDraws) < 3 * 0.1 / std::sqrt(static_cast<double>(kDraws)));
}
