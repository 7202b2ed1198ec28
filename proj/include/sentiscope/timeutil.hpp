#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sentiscope {

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t days_from_civil(int year, unsigned month, unsigned day);

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
};
CivilDate civil_from_days(std::int64_t days);

// ISO-8601 date-time ("2012-12-14T15:02:00Z", "...+05:00", "...-0500",
// optional fractional seconds, ' ' accepted for 'T'). A missing offset
// means UTC. Returns seconds since the Unix epoch.
std::optional<std::int64_t> parse_iso8601(std::string_view text);
// "YYYY-MM-DD" -> epoch seconds at 00:00:00 UTC.
std::optional<std::int64_t> parse_date(std::string_view text);

std::string format_iso8601(std::int64_t epoch_seconds);  // always "...Z"
std::string format_date(std::int64_t epoch_seconds);

// Floor division aware of negative timestamps.
constexpr std::int64_t floor_to(std::int64_t t, std::int64_t step) {
  const std::int64_t q = t / step;
  return (t % step != 0 && t < 0 ? q - 1 : q) * step;
}

}  // namespace sentiscope
