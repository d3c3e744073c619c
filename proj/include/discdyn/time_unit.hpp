#pragma once

#include <optional>
#include <string_view>

namespace discdyn {

/// Unit in which elapsed times, time constants and dead times are expressed.
enum class TimeUnit { hour, day };

inline double seconds_per(TimeUnit unit) {
  return unit == TimeUnit::hour ? 3600.0 : 86400.0;
}

inline const char* time_unit_name(TimeUnit unit) {
  return unit == TimeUnit::hour ? "hour" : "day";
}

inline std::optional<TimeUnit> parse_time_unit(std::string_view text) {
  if (text == "hour" || text == "h") return TimeUnit::hour;
  if (text == "day" || text == "d") return TimeUnit::day;
  return std::nullopt;
}

}  // namespace discdyn
