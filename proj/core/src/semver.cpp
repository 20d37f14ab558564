#include "srank/semver.hpp"

#include <algorithm>
#include <limits>

namespace srank::semver {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_identifier_char(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-';
}

// Numeric core component: digits only, no leading zeros, fits in uint64.
ParseErrc parse_number(std::string_view part, std::uint64_t& out) {
  if (part.empty()) return ParseErrc::empty_identifier;
  for (char c : part) {
    if (!is_digit(c)) return ParseErrc::illegal_character;
  }
  if (part.size() > 1 && part[0] == '0') return ParseErrc::leading_zero;
  constexpr std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t value = 0;
  for (char c : part) {
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (value > (max - digit) / 10) return ParseErrc::number_out_of_range;
    value = value * 10 + digit;
  }
  out = value;
  return ParseErrc::none;
}

void split_dots(std::string_view text, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    if (dot == std::string_view::npos) {
      out.push_back(text.substr(start));
      return;
    }
    out.push_back(text.substr(start, dot - start));
    start = dot + 1;
  }
}

ParseErrc parse_prerelease_identifier(std::string_view part, Identifier& out) {
  if (part.empty()) return ParseErrc::empty_identifier;
  bool all_digits = true;
  for (char c : part) {
    if (!is_identifier_char(c)) return ParseErrc::illegal_character;
    if (!is_digit(c)) all_digits = false;
  }
  out.text.assign(part);
  if (all_digits) {
    if (part.size() > 1 && part[0] == '0') return ParseErrc::leading_zero;
    out.numeric = true;
    return parse_number(part, out.number);
  }
  out.numeric = false;
  out.number = 0;
  return ParseErrc::none;
}

}  // namespace

const char* to_string(ParseErrc errc) {
  switch (errc) {
    case ParseErrc::none: return "ok";
    case ParseErrc::component_count: return "component-count";
    case ParseErrc::leading_zero: return "leading-zero";
    case ParseErrc::empty_identifier: return "empty-identifier";
    case ParseErrc::illegal_character: return "illegal-character";
    case ParseErrc::number_out_of_range: return "number-out-of-range";
  }
  return "unknown";
}

ParseResult parse(std::string_view text) {
  auto fail = [](ParseErrc errc) { return ParseResult{std::nullopt, errc}; };

  // Split off build metadata first: everything after the first '+'.
  std::string_view build_part;
  if (const std::size_t plus = text.find('+'); plus != std::string_view::npos) {
    build_part = text.substr(plus + 1);
    text = text.substr(0, plus);
    if (build_part.empty()) return fail(ParseErrc::empty_identifier);
  }

  std::string_view prerelease_part;
  bool has_prerelease = false;
  if (const std::size_t dash = text.find('-'); dash != std::string_view::npos) {
    prerelease_part = text.substr(dash + 1);
    text = text.substr(0, dash);
    has_prerelease = true;
    if (prerelease_part.empty()) return fail(ParseErrc::empty_identifier);
  }

  std::vector<std::string_view> parts;
  split_dots(text, parts);
  if (parts.size() != 3) return fail(ParseErrc::component_count);

  Version v;
  if (auto e = parse_number(parts[0], v.major); e != ParseErrc::none) return fail(e);
  if (auto e = parse_number(parts[1], v.minor); e != ParseErrc::none) return fail(e);
  if (auto e = parse_number(parts[2], v.patch); e != ParseErrc::none) return fail(e);

  if (has_prerelease) {
    split_dots(prerelease_part, parts);
    for (std::string_view part : parts) {
      Identifier id;
      if (auto e = parse_prerelease_identifier(part, id); e != ParseErrc::none) return fail(e);
      v.prerelease.push_back(std::move(id));
    }
  }

  if (!build_part.empty()) {
    split_dots(build_part, parts);
    for (std::string_view part : parts) {
      if (part.empty()) return fail(ParseErrc::empty_identifier);
      for (char c : part) {
        if (!is_identifier_char(c)) return fail(ParseErrc::illegal_character);
      }
      v.build.emplace_back(part);
    }
  }

  return ParseResult{std::move(v), ParseErrc::none};
}

std::string Version::to_string() const {
  std::string out = std::to_string(major);
  out += '.';
  out += std::to_string(minor);
  out += '.';
  out += std::to_string(patch);
  for (std::size_t i = 0; i < prerelease.size(); ++i) {
    out += i == 0 ? '-' : '.';
    out += prerelease[i].text;
  }
  for (std::size_t i = 0; i < build.size(); ++i) {
    out += i == 0 ? '+' : '.';
    out += build[i];
  }
  return out;
}

std::strong_ordering compare(const Version& a, const Version& b) {
  if (auto c = a.major <=> b.major; c != 0) return c;
  if (auto c = a.minor <=> b.minor; c != 0) return c;
  if (auto c = a.patch <=> b.patch; c != 0) return c;

  // A prerelease precedes the corresponding release.
  if (a.prerelease.empty() != b.prerelease.empty())
    return a.prerelease.empty() ? std::strong_ordering::greater : std::strong_ordering::less;

  const std::size_t n = std::min(a.prerelease.size(), b.prerelease.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Identifier& x = a.prerelease[i];
    const Identifier& y = b.prerelease[i];
    if (x.numeric != y.numeric)
      return x.numeric ? std::strong_ordering::less : std::strong_ordering::greater;
    if (x.numeric) {
      if (auto c = x.number <=> y.number; c != 0) return c;
    } else {
      if (auto c = x.text.compare(y.text); c != 0)
        return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
  }
  // Identical prefix: the shorter identifier list precedes.
  return a.prerelease.size() <=> b.prerelease.size();
}

ReleaseFlags release_flags(std::span<const Release> releases, UtcTime now) {
  ReleaseFlags flags;
  if (releases.empty()) return flags;

  flags.has_multiple_versions = releases.size() >= 2;
  flags.recent_release =
      releases.back().published_at >= now.minus_days(kSixMonthsDays);
  flags.not_brand_new =
      releases.front().published_at <= now.minus_days(kSixMonthsDays);

  bool all_parse = true;
  bool all_prerelease = true;
  static const Version one_point_oh{1, 0, 0, {}, {}};
  for (const Release& release : releases) {
    const ParseResult parsed = parse(release.version_text);
    if (!parsed.ok()) {
      all_parse = false;
      all_prerelease = false;
      continue;
    }
    if (!parsed.version->is_prerelease()) {
      all_prerelease = false;
      if (compare(*parsed.version, one_point_oh) >= 0) flags.ge_1_0_0 = true;
    }
  }
  flags.follows_semver = all_parse;
  flags.all_prereleases = all_parse && all_prerelease;
  return flags;
}

}  // namespace srank::semver
