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

#include "sysmart/foodtrack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sysmart/timefmt.hpp"

namespace sysmart::foodtrack {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::kFormat, "tag image truncated");
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t abs_diff(std::uint16_t a, std::uint16_t b) {
  return a > b ? a - b : b - a;
}

bool valid_password_char(char c) { return c >= 0x20 && c <= 0x7E; }

}  // namespace

RecordBytes encode_record(const LogRecord& r) {
  if (r.minutes_since_first > kMaxMinutes || r.temp_raw > kMaxTempRaw ||
      r.hum_raw > kMaxHumRaw) {
    throw Error(ErrorCode::kRange, "log record field exceeds its bit width");
  }
  const std::uint64_t word = (static_cast<std::uint64_t>(r.minutes_since_first) << 26) |
                             (static_cast<std::uint64_t>(r.temp_raw) << 14) | r.hum_raw;
  RecordBytes out{};
  for (std::size_t i = 0; i < kRecordOctets; ++i) {
    out[i] = static_cast<std::uint8_t>(word >> (8 * (kRecordOctets - 1 - i)));
  }
  return out;
}

LogRecord decode_record(std::span<const std::uint8_t> octets) {
  if (octets.size() != kRecordOctets) {
    throw Error(ErrorCode::kFraming, "log record must be 6 octets");
  }
  std::uint64_t word = 0;
  for (auto b : octets) word = (word << 8) | b;
  return {static_cast<std::uint32_t>(word >> 26),
          static_cast<std::uint16_t>((word >> 14) & kMaxTempRaw),
          static_cast<std::uint16_t>(word & kMaxHumRaw)};
}

double raw_to_celsius(std::uint16_t temp_raw) { return temp_raw * 165.0 / 4096.0 - 40.0; }

double raw_to_rh(std::uint16_t hum_raw) { return hum_raw * 100.0 / 16384.0; }

std::uint16_t celsius_to_raw(double celsius) {
  const double raw = std::round((celsius + 40.0) * 4096.0 / 165.0);
  return static_cast<std::uint16_t>(std::clamp(raw, 0.0, static_cast<double>(kMaxTempRaw)));
}

std::uint16_t rh_to_raw(double rh) {
  const double raw = std::round(rh * 16384.0 / 100.0);
  return static_cast<std::uint16_t>(std::clamp(raw, 0.0, static_cast<double>(kMaxHumRaw)));
}

std::string_view to_string(PlantEventKind kind) {
  return kind == PlantEventKind::kArrival ? "arrival" : "departure";
}

PlantEventKind parse_plant_event_kind(std::string_view text) {
  if (text == "arrival") return PlantEventKind::kArrival;
  if (text == "departure") return PlantEventKind::kDeparture;
  throw Error(ErrorCode::kArgument, "event kind must be arrival or departure");
}

std::string_view to_string(TagField field) {
  return field == TagField::kProductionDate ? "production_date" : "expiry_date";
}

TagField parse_tag_field(std::string_view name) {
  if (name == "production_date") return TagField::kProductionDate;
  if (name == "expiry_date") return TagField::kExpiryDate;
  throw Error(ErrorCode::kArgument, "unknown tag field '" + std::string(name) + "'");
}

FoodTag::FoodTag(const Rtc& rtc, std::size_t log_region_octets) : rtc_(&rtc) {
  // The memory image records the region size in 16 bits.
  if (log_region_octets < kRecordOctets || log_region_octets > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kArgument, "log region must be 6..65535 octets");
  }
  log_region_.assign(log_region_octets, 0);
}

void FoodTag::require_initialized() const {
  if (state_ != TagState::kInitialized) throw Error(ErrorCode::kState, "tag is blank");
}

void FoodTag::clear() {
  state_ = TagState::kBlank;
  password_.clear();
  production_date_ = expiry_date_ = first_log_time_ = 0;
  plant_events_.clear();
  std::fill(log_region_.begin(), log_region_.end(), std::uint8_t{0});
  log_count_ = 0;
  overflow_ = false;
  max_temp_raw_ = 0;
  temp_sum_ = 0;
  thresholds_ = {0, 0};
  sample_interval_ = 0;
}

void FoodTag::init(const TagConfig& config) {
  if (state_ != TagState::kBlank) throw Error(ErrorCode::kState, "tag already initialized");
  if (config.password.size() != kPasswordLength) {
    throw Error(ErrorCode::kValidation, "password must be exactly 20 characters, got " +
                                            std::to_string(config.password.size()));
  }
  if (!std::all_of(config.password.begin(), config.password.end(), valid_password_char)) {
    throw Error(ErrorCode::kValidation, "password must be printable ASCII");
  }
  if (config.sample_interval_minutes == 0) {
    throw Error(ErrorCode::kValidation, "sample interval must be at least one minute");
  }
  if (config.thresholds.temp_raw > kMaxTempRaw || config.thresholds.hum_raw > kMaxHumRaw) {
    throw Error(ErrorCode::kValidation, "threshold exceeds sensor range");
  }
  if (config.production_date == 0u || config.expiry_date == 0u) {
    throw Error(ErrorCode::kValidation, "dates must be positive unix times");
  }
  state_ = TagState::kInitialized;
  password_ = config.password;
  production_date_ = config.production_date.value_or(0);
  expiry_date_ = config.expiry_date.value_or(0);
  thresholds_ = config.thresholds;
  sample_interval_ = config.sample_interval_minutes;
}

void FoodTag::set_field(TagField field, UnixSeconds value) {
  require_initialized();
  if (value == 0) throw Error(ErrorCode::kArgument, "field value must be a positive unix time");
  UnixSeconds& slot = field == TagField::kProductionDate ? production_date_ : expiry_date_;
  if (slot != 0) {
    throw Error(ErrorCode::kTamper, std::string(to_string(field)) + " is already set");
  }
  slot = value;
}

void FoodTag::set_field(std::string_view field, UnixSeconds value) {
  set_field(parse_tag_field(field), value);
}

void FoodTag::record_plant_event(std::uint16_t plant_id, PlantEventKind kind) {
  require_initialized();
  if (plant_events_.size() >= kPlantEventCapacity) {
    throw Error(ErrorCode::kCapacity, "plant event region full (8 events)");
  }
  const UnixSeconds now = rtc_->now();
  if (!plant_events_.empty() && now < plant_events_.back().timestamp) {
    throw Error(ErrorCode::kClock, "clock is behind the last plant event");
  }
  plant_events_.push_back({plant_id, kind, now});
}

bool FoodTag::sample(const SensorReading& reading) {
  require_initialized();
  if (reading.temp_raw > kMaxTempRaw || reading.hum_raw > kMaxHumRaw) {
    throw Error(ErrorCode::kRange, "sensor reading exceeds its bit width");
  }

  LogRecord record{0, reading.temp_raw, reading.hum_raw};
  if (log_count_ > 0) {
    if (reading.rtc_now < first_log_time_) {
      throw Error(ErrorCode::kClock, "reading is older than the first log record");
    }
    const LogRecord last = log_record(log_count_ - 1);
    const std::uint64_t minutes = (reading.rtc_now - first_log_time_) / 60;
    if (minutes < last.minutes_since_first) {
      throw Error(ErrorCode::kClock, "reading is older than the last log record");
    }
    const bool moved = abs_diff(reading.temp_raw, last.temp_raw) >= thresholds_.temp_raw ||
                       abs_diff(reading.hum_raw, last.hum_raw) >= thresholds_.hum_raw;
    if (!moved) return false;
    if (minutes > kMaxMinutes || log_count_ == log_capacity()) {
      overflow_ = true;
      return false;
    }
    record.minutes_since_first = static_cast<std::uint32_t>(minutes);
  } else {
    first_log_time_ = reading.rtc_now;
  }

  const auto bytes = encode_record(record);
  std::copy(bytes.begin(), bytes.end(), log_region_.begin() + log_count_ * kRecordOctets);
  ++log_count_;
  max_temp_raw_ = log_count_ == 1 ? record.temp_raw : std::max(max_temp_raw_, record.temp_raw);
  temp_sum_ += record.temp_raw;
  return true;
}

bool FoodTag::sample(std::uint16_t temp_raw, std::uint16_t hum_raw) {
  return sample(SensorReading{temp_raw, hum_raw, rtc_->now()});
}

void FoodTag::reset(std::string_view password_attempt) {
  require_initialized();
  if (password_.empty() || password_attempt != password_) {
    throw Error(ErrorCode::kAuthentication, "password mismatch");
  }
  clear();
}

LogRecord FoodTag::log_record(std::size_t index) const {
  if (index >= log_count_) throw Error(ErrorCode::kRange, "log index out of range");
  return decode_record(
      std::span(log_region_).subspan(index * kRecordOctets, kRecordOctets));
}

std::vector<LogRecord> FoodTag::log() const {
  std::vector<LogRecord> out;
  out.reserve(log_count_);
  for (std::size_t i = 0; i < log_count_; ++i) out.push_back(log_record(i));
  return out;
}

std::optional<UnixSeconds> FoodTag::production_date() const {
  return production_date_ ? std::optional(production_date_) : std::nullopt;
}

std::optional<UnixSeconds> FoodTag::expiry_date() const {
  return expiry_date_ ? std::optional(expiry_date_) : std::nullopt;
}

std::int64_t FoodTag::record_time(const LogRecord& record) const {
  return static_cast<std::int64_t>(first_log_time_) +
         60 * static_cast<std::int64_t>(record.minutes_since_first);
}

TagSummary FoodTag::read_summary() const {
  require_initialized();
  TagSummary s;
  s.production_date = production_date();
  s.expiry_date = expiry_date();
  s.plant_events = plant_events_;
  s.log_count = log_count_;
  s.overflow = overflow_;
  if (log_count_ > 0) {
    s.max_temp_c = raw_to_celsius(max_temp_raw_);
    // The transfer function is affine, so the mean of raw codes maps to the
    // mean temperature.
    const double mean_raw = static_cast<double>(temp_sum_) / static_cast<double>(log_count_);
    s.avg_temp_c = mean_raw * 165.0 / 4096.0 - 40.0;
  }
  if (production_date_ && expiry_date_) s.estimated_expiry = estimate_expiry();
  return s;
}

std::int64_t FoodTag::estimate_expiry(double reference_temp_c) const {
  require_initialized();
  if (!production_date_ || !expiry_date_) {
    throw Error(ErrorCode::kState, "production and expiry dates must be set");
  }
  const double shelf_life =
      static_cast<double>(expiry_date_) - static_cast<double>(production_date_);
  if (log_count_ == 0) return expiry_date_;

  // The reference is quantized to the sensor grid so a log held at the
  // reference ages at exactly rate 1.
  const int reference_raw = celsius_to_raw(reference_temp_c);
  auto rate_of = [&](std::uint16_t temp_raw) {
    const double delta_c = (static_cast<int>(temp_raw) - reference_raw) * 165.0 / 4096.0;
    return std::pow(kQ10, delta_c / 10.0);
  };

  // Time before the first record ages at the reference rate; a first record
  // older than production pre-pays that amount.
  double t = static_cast<double>(first_log_time_);
  double consumed = t - static_cast<double>(production_date_);
  auto finish = [](double when) { return static_cast<std::int64_t>(std::llround(when)); };
  if (consumed >= shelf_life) return finish(static_cast<double>(production_date_) + shelf_life);

  LogRecord previous = log_record(0);
  for (std::size_t i = 1; i < log_count_; ++i) {
    const LogRecord next = log_record(i);
    const double dt = 60.0 * (next.minutes_since_first - previous.minutes_since_first);
    const double rate = rate_of(previous.temp_raw);
    if (consumed + dt * rate >= shelf_life) return finish(t + (shelf_life - consumed) / rate);
    consumed += dt * rate;
    t += dt;
    previous = next;
  }
  return finish(t + (shelf_life - consumed));
}

std::vector<std::uint8_t> FoodTag::dump() const {
  std::vector<std::uint8_t> out;
  out.reserve(kSummaryHeaderOctets + plant_events_.size() * kPlantEventOctets +
              log_count_ * kRecordOctets);
  out.push_back('S');
  out.push_back('M');
  out.push_back(kDumpVersion);
  out.push_back(static_cast<std::uint8_t>((state_ == TagState::kInitialized ? 1 : 0) |
                                          (overflow_ ? 2 : 0)));
  put_u32(out, production_date_);
  put_u32(out, expiry_date_);
  put_u32(out, first_log_time_);
  put_u16(out, static_cast<std::uint16_t>(log_count_));
  put_u16(out, max_temp_raw_);
  put_u32(out, temp_sum_);
  put_u16(out, thresholds_.temp_raw);
  put_u16(out, thresholds_.hum_raw);
  put_u16(out, sample_interval_);
  out.push_back(static_cast<std::uint8_t>(plant_events_.size()));
  for (const auto& e : plant_events_) {
    put_u16(out, e.plant_id);
    out.push_back(static_cast<std::uint8_t>(e.kind));
    put_u32(out, e.timestamp);
  }
  out.insert(out.end(), log_region_.begin(),
             log_region_.begin() + static_cast<std::ptrdiff_t>(log_count_ * kRecordOctets));
  return out;
}

std::vector<std::uint8_t> FoodTag::memory_image() const {
  auto out = dump();
  std::string padded = password_;
  padded.resize(kPasswordLength, '\0');
  out.insert(out.end(), padded.begin(), padded.end());
  put_u16(out, static_cast<std::uint16_t>(log_region_.size()));
  return out;
}

FoodTag FoodTag::from_memory_image(std::span<const std::uint8_t> image, const Rtc& rtc) {
  if (image.size() < kSummaryHeaderOctets + kProtectedOctets) {
    throw Error(ErrorCode::kFormat, "tag image truncated");
  }
  const auto body = image.first(image.size() - kProtectedOctets);
  const auto trailer = image.last(kProtectedOctets);
  std::string password(trailer.begin(), trailer.begin() + kPasswordLength);
  const auto region = static_cast<std::size_t>((trailer[kPasswordLength] << 8) |
                                               trailer[kPasswordLength + 1]);
  password.erase(password.find_last_not_of('\0') + 1);
  FoodTag tag = from_dump(body, rtc, region);
  if (tag.state_ == TagState::kInitialized) {
    if (password.size() != kPasswordLength) throw Error(ErrorCode::kFormat, "bad password region");
    tag.password_ = password;
  } else if (!password.empty()) {
    throw Error(ErrorCode::kFormat, "blank tag holds a password");
  }
  return tag;
}

FoodTag FoodTag::from_dump(std::span<const std::uint8_t> dump, const Rtc& rtc,
                           std::size_t log_region_octets) {
  Reader in(dump);
  if (in.u8() != 'S' || in.u8() != 'M') throw Error(ErrorCode::kFormat, "bad tag magic");
  if (in.u8() != kDumpVersion) throw Error(ErrorCode::kFormat, "unsupported tag version");
  const std::uint8_t flags = in.u8();
  if (flags & ~0x03) throw Error(ErrorCode::kFormat, "unknown tag flags");

  FoodTag tag(rtc, log_region_octets);
  tag.production_date_ = in.u32();
  tag.expiry_date_ = in.u32();
  tag.first_log_time_ = in.u32();
  tag.log_count_ = in.u16();
  tag.max_temp_raw_ = in.u16();
  tag.temp_sum_ = in.u32();
  tag.thresholds_.temp_raw = in.u16();
  tag.thresholds_.hum_raw = in.u16();
  tag.sample_interval_ = in.u16();
  const std::uint8_t event_count = in.u8();
  if (event_count > kPlantEventCapacity) throw Error(ErrorCode::kFormat, "too many plant events");
  for (std::uint8_t i = 0; i < event_count; ++i) {
    PlantEvent e;
    e.plant_id = in.u16();
    const std::uint8_t kind = in.u8();
    if (kind > 1) throw Error(ErrorCode::kFormat, "unknown plant event kind");
    e.kind = static_cast<PlantEventKind>(kind);
    e.timestamp = in.u32();
    tag.plant_events_.push_back(e);
  }
  if (tag.log_count_ > tag.log_capacity()) throw Error(ErrorCode::kFormat, "log exceeds region");
  const auto records = in.take(tag.log_count_ * kRecordOctets);
  if (in.remaining() != 0) throw Error(ErrorCode::kFormat, "trailing bytes after log region");
  std::copy(records.begin(), records.end(), tag.log_region_.begin());
  tag.overflow_ = (flags & 2) != 0;

  if (!(flags & 1)) {
    FoodTag blank(rtc, log_region_octets);
    if (tag.dump() != blank.dump()) throw Error(ErrorCode::kFormat, "blank tag image carries data");
    return blank;
  }
  tag.state_ = TagState::kInitialized;

  // Counters must agree with the records they summarize.
  std::uint32_t sum = 0;
  std::uint16_t max = 0;
  std::uint32_t last_minute = 0;
  for (std::size_t i = 0; i < tag.log_count_; ++i) {
    const auto r = tag.log_record(i);
    if (i == 0 && r.minutes_since_first != 0) {
      throw Error(ErrorCode::kFormat, "first log record must be at minute 0");
    }
    if (r.minutes_since_first < last_minute) {
      throw Error(ErrorCode::kFormat, "log timestamps decrease");
    }
    last_minute = r.minutes_since_first;
    sum += r.temp_raw;
    max = std::max(max, r.temp_raw);
  }
  if (sum != tag.temp_sum_ || max != tag.max_temp_raw_) {
    throw Error(ErrorCode::kFormat, "summary counters disagree with the log");
  }
  return tag;
}

std::string log_to_csv(const FoodTag& tag) {
  std::string out = "index,timestamp,minutes_since_first,temp_raw,hum_raw,temp_c,rh_percent\n";
  char line[160];
  std::size_t i = 0;
  for (const auto& r : tag.log()) {
    std::snprintf(line, sizeof line, "%zu,%s,%u,%u,%u,%.4f,%.4f\n", i++,
                  format_iso8601(tag.record_time(r)).c_str(), r.minutes_since_first,
                  r.temp_raw, r.hum_raw, raw_to_celsius(r.temp_raw), raw_to_rh(r.hum_raw));
    out += line;
  }
  return out;
}

}  // namespace sysmart::foodtrack
