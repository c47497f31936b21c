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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sysmart/error.hpp"

namespace sysmart::positioning {

using LocationId = std::uint32_t;

inline constexpr double kDefaultReadRange = 0.2;  // meters, cart-mounted LF reader

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

struct Cell {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Floor plan as a grid of square cells; blocked cells are shelving.
class StoreGrid {
 public:
  StoreGrid() = default;
  StoreGrid(int width, int height, double cell_size, std::set<Cell> blocked = {});

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  const std::set<Cell>& blocked() const { return blocked_; }

  bool contains(Cell c) const;
  bool contains(Point p) const;
  bool is_open(Cell c) const { return contains(c) && !blocked_.contains(c); }

  Cell cell_of(Point p) const;
  Point center_of(Cell c) const;

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 1.0;
  std::set<Cell> blocked_;
};

struct TagPlacement {
  LocationId location_id = 0;
  Point position;

  friend bool operator==(const TagPlacement&, const TagPlacement&) = default;
};

/// Floor tags of one store keyed by 6-hex tag id. Keeps a bucket index so
/// reads stay cheap with hundreds of tags.
class TagMap {
 public:
  explicit TagMap(std::uint16_t store_id = 0) : store_id_(store_id) {}

  std::uint16_t store_id() const { return store_id_; }

  /// Throws kValidation on a duplicate id, kFormat on a malformed one.
  void add(const std::string& tag_id, TagPlacement placement);

  const std::map<std::string, TagPlacement>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const TagPlacement* find(std::string_view tag_id) const;

  /// Throws kValidation naming the first tag outside `grid`.
  void validate_against(const StoreGrid& grid) const;

  /// Nearest tag within `range` of `p`, ties to the smaller id.
  std::optional<std::string> nearest_within(Point p, double range) const;

 private:
  using BucketKey = std::int64_t;
  static constexpr double kBucketSize = 0.5;
  static BucketKey key(std::int64_t bx, std::int64_t by);

  std::uint16_t store_id_;
  std::map<std::string, TagPlacement> entries_;
  struct BucketEntry {
    std::string tag_id;
    Point position;
  };
  std::unordered_map<BucketKey, std::vector<BucketEntry>> buckets_;
};

std::optional<std::string> simulate_read(Point cart_position, const TagMap& tags,
                                         double range = kDefaultReadRange);

LocationId resolve_location(std::string_view tag_id, const TagMap& tags);

/// Cell of the location: the cell holding the smallest tag id mapped to it.
Cell location_cell(LocationId location, const StoreGrid& grid, const TagMap& tags);

/// 4-connected BFS. The path excludes `from` and ends at `to`; empty when
/// from == to. Neighbours expand in the order +x, -x, +y, -y.
std::vector<Cell> shortest_path(const StoreGrid& grid, Cell from, Cell to);

std::vector<Cell> route_to_item(LocationId from, LocationId to, const StoreGrid& grid,
                                const TagMap& tags);

}  // namespace sysmart::positioning
