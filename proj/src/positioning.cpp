// Copyright 2026 The SysMART Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sysmart/positioning.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "sysmart/wiegand.hpp"

namespace sysmart::positioning {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

StoreGrid::StoreGrid(int width, int height, double cell_size, std::set<Cell> blocked)
    : width_(width), height_(height), cell_size_(cell_size), blocked_(std::move(blocked)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kValidation, "grid dimensions must be positive");
  }
  if (!(cell_size > 0.0)) throw Error(ErrorCode::kValidation, "cell_size must be positive");
  for (const auto& c : blocked_) {
    if (!contains(c)) {
      throw Error(ErrorCode::kValidation, "blocked cell (" + std::to_string(c.x) + "," +
                                              std::to_string(c.y) + ") outside grid");
    }
  }
}

bool StoreGrid::contains(Cell c) const {
  return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
}

bool StoreGrid::contains(Point p) const {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_ * cell_size_ &&
         p.y <= height_ * cell_size_;
}

Cell StoreGrid::cell_of(Point p) const {
  auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); };
  return {clamp(static_cast<int>(std::floor(p.x / cell_size_)), width_),
          clamp(static_cast<int>(std::floor(p.y / cell_size_)), height_)};
}

Point StoreGrid::center_of(Cell c) const {
  return {(c.x + 0.5) * cell_size_, (c.y + 0.5) * cell_size_};
}

TagMap::BucketKey TagMap::key(std::int64_t bx, std::int64_t by) {
  return (bx << 32) ^ (by & 0xFFFFFFFF);
}

void TagMap::add(const std::string& tag_id, TagPlacement placement) {
  if (!wiegand::is_tag_id(tag_id)) {
    throw Error(ErrorCode::kFormat, "tag id '" + tag_id + "' is not 6 uppercase hex");
  }
  auto [it, inserted] = entries_.emplace(tag_id, placement);
  if (!inserted) throw Error(ErrorCode::kValidation, "duplicate tag id " + tag_id);
  const auto bx = static_cast<std::int64_t>(std::floor(placement.position.x / kBucketSize));
  const auto by = static_cast<std::int64_t>(std::floor(placement.position.y / kBucketSize));
  buckets_[key(bx, by)].push_back({it->first, placement.position});
}

const TagPlacement* TagMap::find(std::string_view tag_id) const {
  auto it = entries_.find(std::string(tag_id));
  return it == entries_.end() ? nullptr : &it->second;
}

void TagMap::validate_against(const StoreGrid& grid) const {
  for (const auto& [id, placement] : entries_) {
    if (!grid.contains(placement.position)) {
      throw Error(ErrorCode::kValidation, "tag " + id + " lies outside the store grid");
    }
  }
}

std::optional<std::string> TagMap::nearest_within(Point p, double range) const {
  const auto lo_x = static_cast<std::int64_t>(std::floor((p.x - range) / kBucketSize));
  const auto hi_x = static_cast<std::int64_t>(std::floor((p.x + range) / kBucketSize));
  const auto lo_y = static_cast<std::int64_t>(std::floor((p.y - range) / kBucketSize));
  const auto hi_y = static_cast<std::int64_t>(std::floor((p.y + range) / kBucketSize));

  const std::string* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::string& id, Point at) {
    const double d = distance(p, at);
    if (d > range) return;
    if (d < best_d || (d == best_d && id < *best)) {
      best = &id;
      best_d = d;
    }
  };

  const auto span = (hi_x - lo_x + 1) * (hi_y - lo_y + 1);
  if (span > static_cast<std::int64_t>(entries_.size())) {
    for (const auto& [id, placement] : entries_) consider(id, placement.position);
  } else {
    for (auto bx = lo_x; bx <= hi_x; ++bx) {
      for (auto by = lo_y; by <= hi_y; ++by) {
        auto it = buckets_.find(key(bx, by));
        if (it == buckets_.end()) continue;
        for (const auto& e : it->second) consider(e.tag_id, e.position);
      }
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<std::string> simulate_read(Point cart_position, const TagMap& tags,
                                         double range) {
  if (!(range > 0.0)) throw Error(ErrorCode::kArgument, "read range must be positive");
  return tags.nearest_within(cart_position, range);
}

LocationId resolve_location(std::string_view tag_id, const TagMap& tags) {
  const auto* placement = tags.find(tag_id);
  if (!placement) throw Error(ErrorCode::kLookup, "unknown tag " + std::string(tag_id));
  return placement->location_id;
}

Cell location_cell(LocationId location, const StoreGrid& grid, const TagMap& tags) {
  for (const auto& [id, placement] : tags.entries()) {
    if (placement.location_id == location) return grid.cell_of(placement.position);
  }
  throw Error(ErrorCode::kLookup, "no tag mapped to location " + std::to_string(location));
}

std::vector<Cell> shortest_path(const StoreGrid& grid, Cell from, Cell to) {
  if (!grid.is_open(from) || !grid.is_open(to)) {
    throw Error(ErrorCode::kRouting, "route endpoint is blocked or outside the grid");
  }
  if (from == to) return {};

  const auto w = grid.width();
  auto index = [w](Cell c) { return static_cast<std::size_t>(c.y) * w + c.x; };
  std::vector<int> parent(static_cast<std::size_t>(w) * grid.height(), -1);
  std::vector<bool> seen(parent.size(), false);
  std::deque<Cell> frontier{from};
  seen[index(from)] = true;

  constexpr Cell kSteps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    if (c == to) break;
    for (const auto& step : kSteps) {
      const Cell n{c.x + step.x, c.y + step.y};
      if (!grid.is_open(n) || seen[index(n)]) continue;
      seen[index(n)] = true;
      parent[index(n)] = static_cast<int>(index(c));
      frontier.push_back(n);
    }
  }
  if (!seen[index(to)]) throw Error(ErrorCode::kRouting, "destination unreachable");

  std::vector<Cell> path;
  for (auto i = static_cast<int>(index(to)); i != static_cast<int>(index(from));
       i = parent[static_cast<std::size_t>(i)]) {
    path.push_back({i % w, i / w});
  }
  return {path.rbegin(), path.rend()};
}

std::vector<Cell> route_to_item(LocationId from, LocationId to, const StoreGrid& grid,
                                const TagMap& tags) {
  return shortest_path(grid, location_cell(from, grid, tags), location_cell(to, grid, tags));
}

}  // namespace sysmart::positioning
