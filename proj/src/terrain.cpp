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

#include "cpgloco/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cpgloco {
namespace {

using nlohmann::json;

int cells_for(double extent, double resolution) {
  return static_cast<int>(std::lround(extent / resolution));
}

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Distance from a point to a box footprint.
double distance_to_box(const Box& b, double px, double py) {
  const double dx = std::max(std::abs(px - b.cx) - 0.5 * b.width, 0.0);
  const double dy = std::max(std::abs(py - b.cy) - 0.5 * b.length, 0.0);
  return std::hypot(dx, dy);
}

}  // namespace

Heightmap::Heightmap(double resolution, double origin_x, double origin_y, int nx, int ny)
    : resolution_(resolution), origin_x_(origin_x), origin_y_(origin_y), nx_(nx), ny_(ny) {
  if (!(resolution > 0.0) || nx <= 0 || ny <= 0) {
    throw RangeError("heightmap needs a positive resolution and cell counts");
  }
  heights_.assign(static_cast<std::size_t>(nx) * ny, 0.0);
}

double Heightmap::height_at(double x, double y) const {
  const int ix = std::clamp(static_cast<int>(std::floor((x - origin_x_) / resolution_)), 0,
                            nx_ - 1);
  const int iy = std::clamp(static_cast<int>(std::floor((y - origin_y_) / resolution_)), 0,
                            ny_ - 1);
  return heights_[static_cast<std::size_t>(iy) * nx_ + ix];
}

void Heightmap::add_box(const Box& box) {
  const int ix0 = std::max(0, static_cast<int>(std::floor(
                                  (box.cx - 0.5 * box.width - origin_x_) / resolution_)));
  const int ix1 = std::min(nx_ - 1, static_cast<int>(std::floor(
                                        (box.cx + 0.5 * box.width - origin_x_) / resolution_)));
  const int iy0 = std::max(0, static_cast<int>(std::floor(
                                  (box.cy - 0.5 * box.length - origin_y_) / resolution_)));
  const int iy1 = std::min(ny_ - 1, static_cast<int>(std::floor(
                                        (box.cy + 0.5 * box.length - origin_y_) / resolution_)));
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      if (!box.covers(cell_center_x(ix), cell_center_y(iy))) continue;
      double& h = heights_[static_cast<std::size_t>(iy) * nx_ + ix];
      h = std::max(h, box.height);
    }
  }
}

World World::from_boxes(std::string kind, double resolution, double origin_x, double origin_y,
                        int nx, int ny, std::vector<Box> boxes) {
  World w;
  w.kind = std::move(kind);
  w.map = Heightmap(resolution, origin_x, origin_y, nx, ny);
  w.boxes = std::move(boxes);
  for (const Box& b : w.boxes) w.map.add_box(b);
  return w;
}

std::string World::to_json() const {
  json j;
  j["format"] = "cpgloco-world";
  j["version"] = 1;
  j["kind"] = kind;
  j["resolution"] = map.resolution();
  j["origin"] = {map.origin_x(), map.origin_y()};
  j["cells"] = {map.nx(), map.ny()};
  j["spawn"] = {spawn.x, spawn.y, spawn.yaw};
  if (goal) j["goal"] = {goal->x_min, goal->x_max, goal->y_min, goal->y_max};
  json boxes_json = json::array();
  for (const Box& b : boxes) {
    boxes_json.push_back(
        {{"center", {b.cx, b.cy}}, {"size", {b.width, b.length}}, {"height", b.height}});
  }
  j["boxes"] = std::move(boxes_json);
  return j.dump(1);
}

World World::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("world file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "cpgloco-world") throw SpecError("not a cpgloco world file");
    std::vector<Box> boxes;
    for (const auto& b : j.at("boxes")) {
      Box box;
      box.cx = b.at("center").at(0).get<double>();
      box.cy = b.at("center").at(1).get<double>();
      box.width = b.at("size").at(0).get<double>();
      box.length = b.at("size").at(1).get<double>();
      box.height = b.at("height").get<double>();
      if (!(box.width > 0.0) || !(box.length > 0.0) || !std::isfinite(box.height)) {
        throw SpecError("world file has a degenerate box");
      }
      boxes.push_back(box);
    }
    World w = from_boxes(j.value("kind", "file"), j.at("resolution").get<double>(),
                         j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>(),
                         j.at("cells").at(0).get<int>(), j.at("cells").at(1).get<int>(),
                         std::move(boxes));
    if (j.contains("spawn")) {
      const auto& s = j.at("spawn");
      w.spawn = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
    }
    if (j.contains("goal")) {
      const auto& g = j.at("goal");
      w.goal = GoalRegion{g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>(),
                          g.at(3).get<double>()};
    }
    return w;
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed world file: ") + e.what());
  }
}

void World::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write world file " + path);
  out << to_json() << '\n';
}

World World::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read world file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

World flat_world(double arena_size) {
  if (!(arena_size > 0.0)) throw RangeError("arena size must be positive");
  const int n = cells_for(arena_size, kDefaultMapResolution);
  return World::from_boxes("flat", kDefaultMapResolution, -0.5 * arena_size, -0.5 * arena_size,
                           n, n, {});
}

World generate_terrain(std::uint64_t seed, double difficulty, double arena_size,
                       const TerrainOptions& options) {
  if (!(arena_size > 0.0)) throw RangeError("arena size must be positive");
  difficulty = std::clamp(difficulty, 0.0, 1.0);
  const int n = cells_for(arena_size, options.resolution);
  const double half = 0.5 * arena_size;

  std::mt19937_64 rng = seeded(seed, 0x7e77a1);
  const double max_boxes = options.boxes_per_m2 * arena_size * arena_size;
  const int count = static_cast<int>(std::lround(difficulty * max_boxes));
  const double h_hi = options.height.lo + difficulty * (options.height.hi - options.height.lo);
  std::uniform_real_distribution<double> size(options.width.lo, options.width.hi);
  std::uniform_real_distribution<double> height(options.height.lo, h_hi);
  std::uniform_real_distribution<double> pos(-half, half);

  std::vector<Box> boxes;
  boxes.reserve(count);
  for (int k = 0; k < count; ++k) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      Box b;
      b.width = size(rng);
      b.length = size(rng);
      b.height = height(rng);
      b.cx = pos(rng);
      b.cy = pos(rng);
      if (distance_to_box(b, 0.0, 0.0) > options.spawn_radius) {
        boxes.push_back(b);
        break;
      }
    }
  }
  World w = World::from_boxes("generated", options.resolution, -half, -half, n, n,
                              std::move(boxes));
  return w;
}

World corridor_world(double width, const CorridorOptions& o) {
  if (!(width > 0.4)) throw RangeError("corridor must be wider than the robot");
  const double half = 0.5 * width;
  const double margin = 0.25;
  const double y0 = -half - o.wall_thickness - margin;
  const double x0 = -o.behind;
  const double ext_x = o.behind + o.length;
  const double ext_y = width + 2.0 * (o.wall_thickness + margin);
  std::vector<Box> boxes = {
      {0.5 * (x0 + o.length), half + 0.5 * o.wall_thickness, ext_x, o.wall_thickness,
       o.wall_height},
      {0.5 * (x0 + o.length), -half - 0.5 * o.wall_thickness, ext_x, o.wall_thickness,
       o.wall_height},
  };
  World w = World::from_boxes("corridor", o.resolution, x0, y0, cells_for(ext_x, o.resolution),
                              cells_for(ext_y, o.resolution), std::move(boxes));
  w.goal = GoalRegion{o.length - 1.0, o.length, -half, half};
  return w;
}

World navigation_world(std::uint64_t seed, const NavigationOptions& o) {
  std::mt19937_64 rng = seeded(seed, 0x4e4156);
  std::uniform_real_distribution<double> jitter(-o.jitter, o.jitter);
  const double half = 0.5 * o.width;
  const double behind = 2.0;
  const double margin = 0.25;
  const double x0 = -behind;
  const double ext_x = behind + o.length + o.wall_thickness + margin;
  const double y0 = -half - o.wall_thickness - margin;
  const double ext_y = o.width + 2.0 * (o.wall_thickness + margin);
  const double t = o.wall_thickness;
  const double wall_len = behind + o.length;
  const double mid_x = 0.5 * (x0 + o.length);

  std::vector<Box> boxes;
  boxes.push_back({mid_x, half + 0.5 * t, wall_len, t, o.wall_height});
  boxes.push_back({mid_x, -half - 0.5 * t, wall_len, t, o.wall_height});
  boxes.push_back({x0 + 0.5 * t, 0.0, t, o.width, o.wall_height});
  boxes.push_back({o.length + 0.5 * t, 0.0, t, o.width + 2.0 * t, o.wall_height});

  // First baffle spans from the right wall and leaves the gap on the left.
  const double baffle_len = o.width - o.gap;
  boxes.push_back({o.first_baffle_x + jitter(rng), -half + 0.5 * baffle_len, o.baffle_thickness,
                   baffle_len, o.wall_height});
  // Second baffle spans from the left wall and leaves the gap on the right.
  boxes.push_back({o.second_baffle_x + jitter(rng), half - 0.5 * baffle_len,
                   o.baffle_thickness, baffle_len, o.wall_height});
  boxes.push_back(
      {o.obstacle_x + jitter(rng), 0.0, o.obstacle_size, o.obstacle_size, o.wall_height});

  World w = World::from_boxes("navigation", o.resolution, x0, y0,
                              cells_for(ext_x, o.resolution), cells_for(ext_y, o.resolution),
                              std::move(boxes));
  w.goal = GoalRegion{o.length - 2.0, o.length - 0.5, -half, half};
  return w;
}

std::pair<double, double> height_grid_offset(int k, const HeightGridOptions& o) {
  const int row = k / o.cols;
  const int col = k % o.cols;
  const double bx = o.forward_offset + (row - 0.5 * (o.rows - 1)) * o.spacing;
  const double by = (col - 0.5 * (o.cols - 1)) * o.spacing;
  return {bx, by};
}

std::vector<double> sample_height_grid(const Heightmap& map, const BasePose& base,
                                       double noise_std, std::mt19937_64& rng,
                                       const HeightGridOptions& o) {
  const double c = std::cos(base.yaw);
  const double s = std::sin(base.yaw);
  const double reference = base.z - o.nominal_height;
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  std::vector<double> out(static_cast<std::size_t>(o.count()));
  for (int k = 0; k < o.count(); ++k) {
    const auto [bx, by] = height_grid_offset(k, o);
    const double wx = base.x + c * bx - s * by;
    const double wy = base.y + s * bx + c * by;
    double v = map.height_at(wx, wy) - reference;
    if (noise_std > 0.0) v += noise(rng);
    out[static_cast<std::size_t>(k)] = v;
  }
  return out;
}

}  // namespace cpgloco
