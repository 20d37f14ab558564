#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace srank {

inline constexpr std::int64_t kSecondsPerDay = 86'400;

// A UTC instant at second precision (seconds since the Unix epoch).
// Feed and API sources differ in sub-second precision, so anything finer
// is truncated on parse.
struct UtcTime {
  std::int64_t secs = 0;

  friend constexpr auto operator<=>(const UtcTime&, const UtcTime&) = default;

  constexpr UtcTime plus_days(std::int64_t days) const {
    return UtcTime{secs + days * kSecondsPerDay};
  }
  constexpr UtcTime minus_days(std::int64_t days) const {
    return UtcTime{secs - days * kSecondsPerDay};
  }
};

constexpr std::int64_t seconds_between(UtcTime from, UtcTime to) {
  return to.secs - from.secs;
}

// Accepts "YYYY-MM-DDTHH:MM:SS" with an optional fractional-seconds part
// (truncated) and a "Z" or "+HH:MM"/"-HH:MM"/"+HHMM" offset suffix.
std::optional<UtcTime> parse_iso8601(std::string_view text);

// Same grammar; throws Error{Parse} instead of returning nullopt.
UtcTime parse_iso8601_or_throw(std::string_view text);

// Renders as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(UtcTime t);

// RFC 822 / RFC 1123 dates as used by syndication feeds,
// e.g. "Fri, 27 Dec 2024 14:21:43 GMT". The weekday is optional.
std::optional<UtcTime> parse_rfc822(std::string_view text);

// Wall-clock UTC now, truncated to seconds.
UtcTime utc_now();

}  // namespace srank
