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

// Dynamic-NFC food-tracker tag emulation.
//
// The tag keeps a summary block that any NFC reader can fetch, plus a log
// region of fixed-width 48-bit records. Dates and plant hand-offs are
// write-once until a password-confirmed reset, and every timestamp comes
// from the tag's own real-time clock.
//
// Memory dump layout (all integers big-endian):
//
//   offset  size  field
//   0       2     magic "SM"
//   2       1     version (1)
//   3       1     flags: bit0 initialized, bit1 overflow
//   4       4     production_date   (unix seconds, 0 = unset)
//   8       4     expiry_date       (unix seconds, 0 = unset)
//   12      4     first_log_time    (unix seconds, 0 = no log yet)
//   16      2     log_count
//   18      2     max_temp_raw
//   20      4     temp_sum
//   24      2     temp threshold (raw)
//   26      2     humidity threshold (raw)
//   28      2     sample_interval (minutes)
//   30      1     plant_event_count
//   31      7*n   plant events {plant_id u16, kind u8, timestamp u32}
//   ...     6*m   log records
//
// Log record, MSB to LSB of the 48-bit word:
//   47..26 minutes since first record, 25..14 temp_raw, 13..0 hum_raw

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sysmart/error.hpp"

namespace sysmart::foodtrack {

using UnixSeconds = std::uint32_t;

inline constexpr std::size_t kRecordOctets = 6;
inline constexpr std::uint32_t kMaxMinutes = (1u << 22) - 1;
inline constexpr std::uint16_t kMaxTempRaw = (1u << 12) - 1;
inline constexpr std::uint16_t kMaxHumRaw = (1u << 14) - 1;
inline constexpr std::size_t kPasswordLength = 20;
inline constexpr std::size_t kPlantEventCapacity = 8;
inline constexpr std::size_t kDefaultLogRegionOctets = 2040;
inline constexpr std::size_t kSummaryHeaderOctets = 31;
inline constexpr std::size_t kPlantEventOctets = 7;
/// Trailer of the full memory image: password, then log region size (u16).
inline constexpr std::size_t kProtectedOctets = kPasswordLength + 2;
inline constexpr std::uint8_t kDumpVersion = 1;

inline constexpr double kDefaultReferenceTempC = 4.0;
inline constexpr double kQ10 = 2.0;

struct LogRecord {
  std::uint32_t minutes_since_first = 0;
  std::uint16_t temp_raw = 0;
  std::uint16_t hum_raw = 0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

using RecordBytes = std::array<std::uint8_t, kRecordOctets>;

RecordBytes encode_record(const LogRecord& record);
LogRecord decode_record(std::span<const std::uint8_t> octets);

// Sensor transfer functions. Inverses round to the nearest code and clamp.
double raw_to_celsius(std::uint16_t temp_raw);
double raw_to_rh(std::uint16_t hum_raw);
std::uint16_t celsius_to_raw(double celsius);
std::uint16_t rh_to_raw(double rh);

enum class TagState : std::uint8_t { kBlank, kInitialized };
enum class PlantEventKind : std::uint8_t { kArrival = 0, kDeparture = 1 };
enum class TagField { kProductionDate, kExpiryDate };

std::string_view to_string(PlantEventKind kind);
PlantEventKind parse_plant_event_kind(std::string_view text);
std::string_view to_string(TagField field);
/// "production_date" / "expiry_date"; anything else is kArgument.
TagField parse_tag_field(std::string_view name);

struct PlantEvent {
  std::uint16_t plant_id = 0;
  PlantEventKind kind = PlantEventKind::kArrival;
  UnixSeconds timestamp = 0;

  friend bool operator==(const PlantEvent&, const PlantEvent&) = default;
};

struct Thresholds {
  std::uint16_t temp_raw = 13;  // ~0.52 C
  std::uint16_t hum_raw = 492;  // ~3 %RH

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct SensorReading {
  std::uint16_t temp_raw = 0;
  std::uint16_t hum_raw = 0;
  UnixSeconds rtc_now = 0;
};

/// Real-time clock of the tag's microcontroller.
class Rtc {
 public:
  virtual ~Rtc() = default;
  virtual UnixSeconds now() const = 0;
};

class ManualRtc final : public Rtc {
 public:
  explicit ManualRtc(UnixSeconds start = 0) : now_(start) {}
  UnixSeconds now() const override { return now_; }
  void set(UnixSeconds t) { now_ = t; }
  void advance(UnixSeconds seconds) { now_ += seconds; }

 private:
  UnixSeconds now_;
};

struct TagConfig {
  std::string password;
  std::optional<UnixSeconds> production_date;
  std::optional<UnixSeconds> expiry_date;
  Thresholds thresholds;
  std::uint16_t sample_interval_minutes = 15;
};

struct TagSummary {
  std::optional<UnixSeconds> production_date;
  std::optional<UnixSeconds> expiry_date;
  std::optional<double> max_temp_c;
  std::optional<double> avg_temp_c;  // record-weighted
  std::optional<std::int64_t> estimated_expiry;
  std::vector<PlantEvent> plant_events;
  std::size_t log_count = 0;
  bool overflow = false;
};

/// One emulated tag. Not thread-safe: a tag is owned by one caller at a
/// time, as reader access and sensor updates never overlap on the device.
class FoodTag {
 public:
  /// `rtc` must outlive the tag.
  explicit FoodTag(const Rtc& rtc, std::size_t log_region_octets = kDefaultLogRegionOctets);

  /// Rebuilds a tag from memory_image().
  static FoodTag from_memory_image(std::span<const std::uint8_t> image, const Rtc& rtc);
  /// Rebuilds a read-only view from dump(); the password region is empty so
  /// reset() always fails authentication.
  static FoodTag from_dump(std::span<const std::uint8_t> dump, const Rtc& rtc,
                           std::size_t log_region_octets = kDefaultLogRegionOctets);

  void init(const TagConfig& config);
  void set_field(TagField field, UnixSeconds value);
  void set_field(std::string_view field, UnixSeconds value);
  void record_plant_event(std::uint16_t plant_id, PlantEventKind kind);

  /// Returns true when the reading was appended to the log.
  bool sample(const SensorReading& reading);
  /// Reading stamped with the tag's clock.
  bool sample(std::uint16_t temp_raw, std::uint16_t hum_raw);

  void reset(std::string_view password_attempt);

  TagSummary read_summary() const;
  std::int64_t estimate_expiry(double reference_temp_c = kDefaultReferenceTempC) const;

  /// Summary block then log region, as an NFC reader sees it.
  std::vector<std::uint8_t> dump() const;
  /// dump() followed by the protected region. Persist this, never serve it.
  std::vector<std::uint8_t> memory_image() const;

  TagState state() const { return state_; }
  bool overflow() const { return overflow_; }
  std::size_t log_capacity() const { return log_region_.size() / kRecordOctets; }
  std::size_t log_region_octets() const { return log_region_.size(); }
  std::size_t log_count() const { return log_count_; }
  LogRecord log_record(std::size_t index) const;
  std::vector<LogRecord> log() const;
  const std::vector<PlantEvent>& plant_events() const { return plant_events_; }
  const Thresholds& thresholds() const { return thresholds_; }
  std::uint16_t sample_interval_minutes() const { return sample_interval_; }
  UnixSeconds first_log_time() const { return first_log_time_; }
  std::uint16_t max_temp_raw() const { return max_temp_raw_; }
  std::uint32_t temp_sum() const { return temp_sum_; }
  std::optional<UnixSeconds> production_date() const;
  std::optional<UnixSeconds> expiry_date() const;
  /// Unix time of a record: first_log_time + 60 * minutes_since_first.
  std::int64_t record_time(const LogRecord& record) const;

 private:
  void require_initialized() const;
  void clear();

  const Rtc* rtc_;
  TagState state_ = TagState::kBlank;
  std::string password_;
  UnixSeconds production_date_ = 0;
  UnixSeconds expiry_date_ = 0;
  UnixSeconds first_log_time_ = 0;
  std::vector<PlantEvent> plant_events_;
  std::vector<std::uint8_t> log_region_;
  std::size_t log_count_ = 0;
  bool overflow_ = false;
  std::uint16_t max_temp_raw_ = 0;
  std::uint32_t temp_sum_ = 0;
  Thresholds thresholds_{0, 0};
  std::uint16_t sample_interval_ = 0;
};

/// Decoded log as CSV: index,timestamp,minutes_since_first,temp_raw,hum_raw,temp_c,rh_percent
std::string log_to_csv(const FoodTag& tag);

}  // namespace sysmart::foodtrack
