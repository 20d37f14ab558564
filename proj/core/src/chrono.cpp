#include "srank/chrono.hpp"

#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>

#include "srank/errors.hpp"

namespace srank {

namespace {

// Howard Hinnant's civil-date algorithm; branch-free and valid far beyond
// any timestamp a registry can produce.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

constexpr CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Parses exactly `width` digits at text[pos...]; advances pos.
std::optional<int> take_digits(std::string_view text, std::size_t& pos, int width) {
  if (pos + static_cast<std::size_t>(width) > text.size()) return std::nullopt;
  int value = 0;
  for (int i = 0; i < width; ++i) {
    char c = text[pos + i];
    if (!is_digit(c)) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  pos += static_cast<std::size_t>(width);
  return value;
}

bool take_char(std::string_view text, std::size_t& pos, char expected) {
  if (pos >= text.size() || text[pos] != expected) return false;
  ++pos;
  return true;
}

unsigned days_in_month(std::int64_t year, unsigned month) {
  static constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                       31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return lengths[month - 1];
}

std::optional<UtcTime> assemble(std::int64_t year, int month, int day, int hour,
                                int minute, int second, std::int64_t offset_secs) {
  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month)))
    return std::nullopt;
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 59)
    return std::nullopt;
  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  return UtcTime{days * kSecondsPerDay + hour * 3600 + minute * 60 + second - offset_secs};
}

}  // namespace

std::optional<UtcTime> parse_iso8601(std::string_view text) {
  std::size_t pos = 0;
  auto year = take_digits(text, pos, 4);
  if (!year || !take_char(text, pos, '-')) return std::nullopt;
  auto month = take_digits(text, pos, 2);
  if (!month || !take_char(text, pos, '-')) return std::nullopt;
  auto day = take_digits(text, pos, 2);
  if (!day) return std::nullopt;
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' '))
    return std::nullopt;
  ++pos;
  auto hour = take_digits(text, pos, 2);
  if (!hour || !take_char(text, pos, ':')) return std::nullopt;
  auto minute = take_digits(text, pos, 2);
  if (!minute || !take_char(text, pos, ':')) return std::nullopt;
  auto second = take_digits(text, pos, 2);
  if (!second) return std::nullopt;

  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && is_digit(text[pos])) {
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }

  std::int64_t offset = 0;
  if (pos >= text.size()) return std::nullopt;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    ++pos;
    auto oh = take_digits(text, pos, 2);
    if (!oh) return std::nullopt;
    if (pos < text.size() && text[pos] == ':') ++pos;
    auto om = take_digits(text, pos, 2);
    if (!om || *oh > 23 || *om > 59) return std::nullopt;
    offset = sign * (static_cast<std::int64_t>(*oh) * 3600 + *om * 60);
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;

  return assemble(*year, *month, *day, *hour, *minute, *second, offset);
}

UtcTime parse_iso8601_or_throw(std::string_view text) {
  auto t = parse_iso8601(text);
  if (!t) throw Error(ErrorKind::Parse, "invalid ISO-8601 timestamp: '" + std::string(text) + "'");
  return *t;
}

std::string format_iso8601(UtcTime t) {
  std::int64_t days = t.secs / kSecondsPerDay;
  std::int64_t rem = t.secs % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const CivilDate date = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(date.year), date.month, date.day,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

std::optional<UtcTime> parse_rfc822(std::string_view text) {
  static constexpr std::array<std::string_view, 12> months = {
      "Jan", "Feb", "Mar", "Apr", "May", "Jun",
      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

  std::size_t pos = 0;
  auto skip_spaces = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };

  skip_spaces();
  // Optional "Ddd, " weekday prefix.
  if (auto comma = text.find(','); comma != std::string_view::npos && comma < 10) {
    pos = comma + 1;
  }
  skip_spaces();

  int day = 0;
  std::size_t day_digits = 0;
  while (pos < text.size() && is_digit(text[pos]) && day_digits < 2) {
    day = day * 10 + (text[pos] - '0');
    ++pos;
    ++day_digits;
  }
  if (day_digits == 0) return std::nullopt;
  skip_spaces();

  int month = 0;
  if (pos + 3 > text.size()) return std::nullopt;
  for (std::size_t i = 0; i < months.size(); ++i) {
    if (text.substr(pos, 3) == months[i]) {
      month = static_cast<int>(i) + 1;
      break;
    }
  }
  if (month == 0) return std::nullopt;
  pos += 3;
  skip_spaces();

  std::int64_t year = 0;
  std::size_t year_digits = 0;
  while (pos < text.size() && is_digit(text[pos])) {
    year = year * 10 + (text[pos] - '0');
    ++pos;
    ++year_digits;
  }
  if (year_digits == 2) year += year < 70 ? 2000 : 1900;
  else if (year_digits != 4) return std::nullopt;
  skip_spaces();

  auto hour = take_digits(text, pos, 2);
  if (!hour || !take_char(text, pos, ':')) return std::nullopt;
  auto minute = take_digits(text, pos, 2);
  if (!minute) return std::nullopt;
  int second = 0;
  if (pos < text.size() && text[pos] == ':') {
    ++pos;
    auto s = take_digits(text, pos, 2);
    if (!s) return std::nullopt;
    second = *s;
  }
  skip_spaces();

  std::int64_t offset = 0;
  if (pos < text.size()) {
    std::string_view zone = text.substr(pos);
    while (!zone.empty() && (zone.back() == ' ' || zone.back() == '\r' || zone.back() == '\n'))
      zone.remove_suffix(1);
    if (zone == "GMT" || zone == "UT" || zone == "UTC" || zone == "Z" || zone.empty()) {
      offset = 0;
    } else if ((zone[0] == '+' || zone[0] == '-') && zone.size() == 5) {
      const int sign = zone[0] == '+' ? 1 : -1;
      std::size_t zpos = 1;
      auto oh = take_digits(zone, zpos, 2);
      auto om = take_digits(zone, zpos, 2);
      if (!oh || !om) return std::nullopt;
      offset = sign * (static_cast<std::int64_t>(*oh) * 3600 + *om * 60);
    } else {
      return std::nullopt;
    }
  }

  return assemble(year, month, day, *hour, *minute, second, offset);
}

UtcTime utc_now() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return UtcTime{std::chrono::duration_cast<std::chrono::seconds>(now).count()};
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Duplicate: return "duplicate";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::Io: return "io";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Credential: return "credential";
    case ErrorKind::Config: return "config";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace srank
