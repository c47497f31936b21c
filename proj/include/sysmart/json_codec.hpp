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

// JSON forms of the domain records, shared by the HTTP API, the journal and
// the CLI. Timestamps are ISO-8601 UTC strings. Decoding failures raise
// Error(kValidation) naming the offending field.

#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sysmart/backend.hpp"
#include "sysmart/foodtrack.hpp"

namespace sysmart::backend {

using nlohmann::json;

void to_json(json& j, const StoreRecord& r);
void from_json(const json& j, StoreRecord& r);
void to_json(json& j, const ProductRecord& r);
void from_json(const json& j, ProductRecord& r);
void to_json(json& j, const LocationRecord& r);
void from_json(const json& j, LocationRecord& r);
void to_json(json& j, const InventoryRecord& r);
void from_json(const json& j, InventoryRecord& r);
void to_json(json& j, const CartLocationRecord& r);
void from_json(const json& j, CartLocationRecord& r);
void to_json(json& j, const MappingRecord& r);
void from_json(const json& j, MappingRecord& r);
void to_json(json& j, const LaneRecord& r);
void from_json(const json& j, LaneRecord& r);
void to_json(json& j, const Ticket& r);
void from_json(const json& j, Ticket& r);
void to_json(json& j, const FoodTagRecord& r);
void from_json(const json& j, FoodTagRecord& r);
void to_json(json& j, const ItemLocation& r);
void to_json(json& j, const BranchOption& r);
void to_json(json& j, const Snapshot& r);
void from_json(const json& j, Snapshot& r);

}  // namespace sysmart::backend

namespace sysmart::foodtrack {

nlohmann::json summary_to_json(const TagSummary& summary);
/// Decoded records with absolute timestamps and engineering units.
nlohmann::json log_to_json(const FoodTag& tag);

}  // namespace sysmart::foodtrack

namespace sysmart {

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

/// Looks up `key` and converts it, turning any failure into
/// Error(kValidation, "<path>.<key>: ...").
template <typename T>
T json_field(const nlohmann::json& j, std::string_view key, std::string_view path = "") {
  const std::string where = path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kValidation, where + ": missing");
  }
  const auto& v = j.at(key);
  try {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw Error(ErrorCode::kValidation, "expected an integer");
      if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (!std::in_range<T>(u)) throw Error(ErrorCode::kRange, "out of range");
        return static_cast<T>(u);
      }
      const auto i = v.get<std::int64_t>();
      if (!std::in_range<T>(i)) throw Error(ErrorCode::kRange, "out of range");
      return static_cast<T>(i);
    } else {
      return v.get<T>();
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, where + ": " + e.what());
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kValidation, where + ": wrong type or out of range");
  }
}

template <typename T>
T json_field_or(const nlohmann::json& j, std::string_view key, T fallback,
                std::string_view path = "") {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return json_field<T>(j, key, path);
}

}  // namespace sysmart
